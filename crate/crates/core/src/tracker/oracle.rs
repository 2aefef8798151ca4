use crate::error::{check_dim, Error, Result};
use crate::experiments::SeededRng;
use crate::linalg::{Lu, SymMatrix, Vector};

/// A sequence of symmetric matrices indexed by step.
pub trait MatrixProvider {
    fn dim(&self) -> usize;

    fn matrix(&self, k: usize) -> SymMatrix;

    /// The limit `A_*`, when known.
    fn limit(&self) -> Option<SymMatrix> {
        None
    }

    /// Analytic upper bound on `η_{k,*} = sup_{i ≥ k} ‖A_i − A_k‖`, when known.
    fn tail_eta_bound(&self, _k: usize) -> Option<f64> {
        None
    }
}

impl<P: MatrixProvider + ?Sized> MatrixProvider for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn matrix(&self, k: usize) -> SymMatrix {
        (**self).matrix(k)
    }
    fn limit(&self) -> Option<SymMatrix> {
        (**self).limit()
    }
    fn tail_eta_bound(&self, k: usize) -> Option<f64> {
        (**self).tail_eta_bound(k)
    }
}

/// Provider backed by a closure `k ↦ A_k`.
pub struct FnProvider<F> {
    dim: usize,
    f: F,
    limit: Option<SymMatrix>,
}

impl<F: Fn(usize) -> SymMatrix> FnProvider<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, limit: None }
    }

    pub fn with_limit(mut self, limit: SymMatrix) -> Self {
        self.limit = Some(limit);
        self
    }
}

impl<F: Fn(usize) -> SymMatrix> MatrixProvider for FnProvider<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn matrix(&self, k: usize) -> SymMatrix {
        (self.f)(k)
    }
    fn limit(&self) -> Option<SymMatrix> {
        self.limit.clone()
    }
}

/// Re-indexes a provider so that step `k` reads `inner.matrix(k + offset)`.
#[derive(Debug, Clone)]
pub struct Shifted<P> {
    inner: P,
    offset: usize,
}

impl<P> Shifted<P> {
    pub fn new(inner: P, offset: usize) -> Self {
        Self { inner, offset }
    }
}

impl<P: MatrixProvider> MatrixProvider for Shifted<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn matrix(&self, k: usize) -> SymMatrix {
        self.inner.matrix(k + self.offset)
    }
    fn limit(&self) -> Option<SymMatrix> {
        self.inner.limit()
    }
    fn tail_eta_bound(&self, k: usize) -> Option<f64> {
        self.inner.tail_eta_bound(k + self.offset)
    }
}

/// One observation `(s_k, y_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecantPair {
    pub s: Vector,
    pub y: Vector,
}

/// Source of secant pairs, optionally exposing the matrices it samples.
///
/// When diagnostics are available, `y_k = A_k s_k` for `A_k = true_matrix(k)`.
pub trait SequenceOracle {
    fn dim(&self) -> usize;

    /// Pair for step `k`. Called with `k = 0, 1, 2, …` in order.
    fn next_pair(&mut self, k: usize) -> Result<SecantPair>;

    fn true_matrix(&self, _k: usize) -> Result<Option<SymMatrix>> {
        Ok(None)
    }

    fn limit(&self) -> Result<Option<SymMatrix>> {
        Ok(None)
    }

    fn tail_eta_bound(&self, _k: usize) -> Option<f64> {
        None
    }
}

/// `e_{k mod d}`.
pub fn cyclic_direction(k: usize, d: usize) -> Vector {
    Vector::basis(d, k % d)
}

/// Tracks `A_k` directly: `y_k = A_k s_k`.
pub struct DirectOracle<P> {
    provider: P,
    directions: Box<dyn Fn(usize) -> Vector + Send + Sync>,
}

impl<P: MatrixProvider> DirectOracle<P> {
    /// Cyclic canonical directions `s_k = e_{k mod d}`.
    pub fn cyclic(provider: P) -> Self {
        let d = provider.dim();
        Self {
            provider,
            directions: Box::new(move |k| cyclic_direction(k, d)),
        }
    }

    pub fn with_directions(provider: P, directions: impl Fn(usize) -> Vector + Send + Sync + 'static) -> Self {
        Self {
            provider,
            directions: Box::new(directions),
        }
    }
}

impl<P: MatrixProvider> SequenceOracle for DirectOracle<P> {
    fn dim(&self) -> usize {
        self.provider.dim()
    }

    fn next_pair(&mut self, k: usize) -> Result<SecantPair> {
        let s = (self.directions)(k);
        check_dim(self.dim(), s.len())?;
        let y = self.provider.matrix(k).mul_vec(&s);
        Ok(SecantPair { s, y })
    }

    fn true_matrix(&self, k: usize) -> Result<Option<SymMatrix>> {
        Ok(Some(self.provider.matrix(k)))
    }

    fn limit(&self) -> Result<Option<SymMatrix>> {
        Ok(self.provider.limit())
    }

    fn tail_eta_bound(&self, k: usize) -> Option<f64> {
        self.provider.tail_eta_bound(k)
    }
}

/// Symmetric inverse of a symmetric matrix (LU, then symmetrised).
pub fn sym_inverse(a: &SymMatrix) -> Result<SymMatrix> {
    let inv = Lu::factor(&a.to_square()).inverse()?;
    Ok(SymMatrix::symmetric_part(&inv))
}

enum InverseDirections {
    Canonical,
    Gaussian(SeededRng),
}

/// Tracks `A_k⁻¹`: `s_k = A_k y_k` with `y_k` canonical or Gaussian.
pub struct InverseOracle<P> {
    provider: P,
    directions: InverseDirections,
    limit_inverse: Option<SymMatrix>,
}

impl<P: MatrixProvider> InverseOracle<P> {
    fn build(provider: P, directions: InverseDirections) -> Result<Self> {
        let limit_inverse = provider.limit().map(|a| sym_inverse(&a)).transpose()?;
        Ok(Self {
            provider,
            directions,
            limit_inverse,
        })
    }
}

/// `s_k = A_k e_{k mod d}`, `y_k = e_{k mod d}`; the tracked limit is `A_*⁻¹`.
pub fn inverse_oracle<P: MatrixProvider>(provider: P) -> Result<InverseOracle<P>> {
    InverseOracle::build(provider, InverseDirections::Canonical)
}

/// `y_k` with standard normal entries, `s_k = A_k y_k`.
pub fn random_direction_oracle<P: MatrixProvider>(provider: P, rng: SeededRng) -> Result<InverseOracle<P>> {
    InverseOracle::build(provider, InverseDirections::Gaussian(rng))
}

impl<P: MatrixProvider> SequenceOracle for InverseOracle<P> {
    fn dim(&self) -> usize {
        self.provider.dim()
    }

    fn next_pair(&mut self, k: usize) -> Result<SecantPair> {
        let d = self.dim();
        let y = match &mut self.directions {
            InverseDirections::Canonical => cyclic_direction(k, d),
            InverseDirections::Gaussian(rng) => Vector::from_fn(d, |_| rng.next_gaussian()),
        };
        let s = self.provider.matrix(k).mul_vec(&y);
        if !(s.norm() > 0.0) {
            return Err(Error::DegenerateDirection(format!("A_{k} y_{k} vanishes")));
        }
        Ok(SecantPair { s, y })
    }

    fn true_matrix(&self, k: usize) -> Result<Option<SymMatrix>> {
        sym_inverse(&self.provider.matrix(k)).map(Some)
    }

    fn limit(&self) -> Result<Option<SymMatrix>> {
        Ok(self.limit_inverse.clone())
    }
}

/// Quasi-Newton secant pairs from a gradient and a list of iterates:
/// `s_k = x_{k+1} − x_k`, `y_k = ∇f(x_{k+1}) − ∇f(x_k)`.
pub struct SecantOracle<G> {
    grad: G,
    iterates: Vec<Vector>,
    hessian: Option<SymMatrix>,
}

impl<G: Fn(&Vector) -> Vector> SecantOracle<G> {
    pub fn new(grad: G, iterates: Vec<Vector>) -> Result<Self> {
        let Some(first) = iterates.first() else {
            return Err(Error::InvalidArgument("need at least one iterate".into()));
        };
        let d = first.len();
        for x in &iterates {
            check_dim(d, x.len())?;
        }
        Ok(Self {
            grad,
            iterates,
            hessian: None,
        })
    }

    /// For quadratic objectives the averaged Hessian is the constant `Q`,
    /// which enables diagnostics.
    pub fn with_constant_hessian(mut self, q: SymMatrix) -> Result<Self> {
        check_dim(self.dim(), q.dim())?;
        self.hessian = Some(q);
        Ok(self)
    }

    pub fn steps_available(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }
}

impl<G: Fn(&Vector) -> Vector> SequenceOracle for SecantOracle<G> {
    fn dim(&self) -> usize {
        self.iterates[0].len()
    }

    fn next_pair(&mut self, k: usize) -> Result<SecantPair> {
        if k + 1 >= self.iterates.len() {
            return Err(Error::InvalidArgument(format!(
                "secant oracle has only {} steps",
                self.steps_available()
            )));
        }
        let (x0, x1) = (&self.iterates[k], &self.iterates[k + 1]);
        let s = x1 - x0;
        if !(s.norm() > 0.0) {
            return Err(Error::DegenerateDirection(format!(
                "iterates {k} and {} coincide",
                k + 1
            )));
        }
        let y = &(self.grad)(x1) - &(self.grad)(x0);
        Ok(SecantPair { s, y })
    }

    fn true_matrix(&self, _k: usize) -> Result<Option<SymMatrix>> {
        Ok(self.hessian.clone())
    }

    fn limit(&self) -> Result<Option<SymMatrix>> {
        Ok(self.hessian.clone())
    }

    fn tail_eta_bound(&self, _k: usize) -> Option<f64> {
        self.hessian.as_ref().map(|_| 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_direction_examples() {
        assert_eq!(cyclic_direction(0, 3), Vector::basis(3, 0));
        assert_eq!(cyclic_direction(3, 3), Vector::basis(3, 0));
        assert_eq!(cyclic_direction(5, 3), Vector::basis(3, 2));
    }

    #[test]
    fn shifted_provider_offsets_index() {
        let p = FnProvider::new(1, |k| SymMatrix::from_diagonal(&[k as f64]));
        let s = Shifted::new(&p, 1);
        assert_eq!(s.matrix(0).get(0, 0), 1.0);
        assert_eq!(s.matrix(4).get(0, 0), 5.0);
    }

    #[test]
    fn inverse_oracle_pairs() {
        let a = SymMatrix::from_diagonal(&[2.0, 4.0]);
        let p = FnProvider::new(2, move |_| a.clone()).with_limit(SymMatrix::from_diagonal(&[2.0, 4.0]));
        let mut o = inverse_oracle(p).unwrap();
        let pair = o.next_pair(1).unwrap();
        assert_eq!(pair.y, Vector::basis(2, 1));
        assert_eq!(pair.s.as_slice(), &[0.0, 4.0]);
        let lim = o.limit().unwrap().unwrap();
        assert_eq!(lim, SymMatrix::from_diagonal(&[0.5, 0.25]));
    }

    #[test]
    fn inverse_oracle_rejects_singular_limit() {
        let p = FnProvider::new(2, |_| SymMatrix::identity(2)).with_limit(SymMatrix::zeros(2));
        assert!(matches!(inverse_oracle(p), Err(Error::Singular { .. })));
        let p = FnProvider::new(2, |_| SymMatrix::zeros(2));
        let o = inverse_oracle(p).unwrap();
        assert!(o.true_matrix(0).is_err());
    }

    #[test]
    fn secant_oracle_rejects_coincident_iterates() {
        let x = Vector::from(vec![1.0, 2.0]);
        let mut o = SecantOracle::new(|x: &Vector| x.clone(), vec![x.clone(), x]).unwrap();
        assert!(matches!(o.next_pair(0), Err(Error::DegenerateDirection(_))));
        assert!(o.next_pair(1).is_err());
    }
}
