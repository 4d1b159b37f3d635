//! Small dense complex linear algebra for qubit registers.
//!
//! Everything here works on dimensions of at most 8 (three qubits), so
//! operators are stored as flat row-major `Vec<Complex64>` grids and all
//! products are naive. Composite indices follow the row-major Kronecker
//! convention: the pair `(i, j)` of an `a ⊗ b` product lives at
//! `i * dim_b + j`, so the first factor is the most significant digit.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for structural checks (normalization, hermiticity, completeness).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for cross-check equalities between independently computed values.
pub const CROSS_CHECK_TOL: f64 = 1e-10;

pub type ComplexScalar = Complex64;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[inline]
fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A state vector. Normalization is not implied by the type; use
/// [`Ket::normalized`] when the caller needs the guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex64>,
}

impl Ket {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("ket must have positive dimension".into()));
        }
        Ok(Self { amps })
    }

    /// Builds a ket and verifies Σ|aᵢ|² = 1 within [`STRUCTURAL_TOL`].
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let ket = Self::new(amps)?;
        let norm_sqr = ket.norm_sqr();
        if (norm_sqr - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(ket)
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&a| c(a)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = c(1.0);
        Self { amps }
    }

    pub fn zero() -> Self {
        Self::basis(2, 0)
    }

    pub fn one() -> Self {
        Self::basis(2, 1)
    }

    pub fn plus() -> Self {
        Self { amps: vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)] }
    }

    pub fn minus() -> Self {
        Self { amps: vec![c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)] }
    }

    /// Qubit state with Bloch vector (sin θ, 0, cos θ), i.e. on the xz great circle.
    pub fn xz_circle(theta: f64) -> Self {
        let half = 0.5 * theta;
        Self { amps: vec![c(half.cos()), c(half.sin())] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= STRUCTURAL_TOL
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨self|other⟩|², the fidelity between two pure states.
    pub fn fidelity(&self, other: &Ket) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest |Im aᵢ| over the amplitudes.
    pub fn max_imaginary(&self) -> f64 {
        self.amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: Complex64) -> Ket {
        Ket { amps: self.amps.iter().map(|a| a * factor).collect() }
    }

    pub fn add(&self, other: &Ket) -> Result<Ket> {
        check_dim(self.dim(), other.dim())?;
        Ok(Ket { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() })
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = c(1.0);
        }
        op
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("operator must have positive dimension".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn pauli_x() -> Self {
        let o = c(0.0);
        Self { dim: 2, data: vec![o, c(1.0), c(1.0), o] }
    }

    pub fn pauli_y() -> Self {
        let o = c(0.0);
        Self { dim: 2, data: vec![o, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), o] }
    }

    pub fn pauli_z() -> Self {
        let o = c(0.0);
        Self { dim: 2, data: vec![c(1.0), o, o, c(-1.0)] }
    }

    /// |a⟩⟨b|
    pub fn outer(a: &Ket, b: &Ket) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        let dim = a.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for x in a.amplitudes() {
            for y in b.amplitudes() {
                data.push(x * y.conj());
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(j, i).conj());
            }
        }
        Self { dim: n, data }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Operator {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * factor).collect() }
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        check_dim(self.dim, ket.dim())?;
        let n = self.dim;
        let amps = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) * ket.amplitudes()[j]).sum())
            .collect();
        Ok(Ket { amps })
    }

    /// max |Aᵢⱼ − conj(Aⱼᵢ)|
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Positivity check by attempting a Cholesky factorization of `A + tol·I`.
    ///
    /// Only meant as a debugging aid; callers that build states from kets do
    /// not need it.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        if self.hermiticity_deviation() > tol {
            return false;
        }
        let n = self.dim;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut diag = self.get(j, j).re + tol;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let djj = diag.sqrt();
            l[j * n + j] = c(djj);
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }
}

/// A mixed state: Hermitian, unit trace. Positivity is trusted to the builder.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Operator,
}

impl DensityOperator {
    pub fn new(matrix: Operator) -> Result<Self> {
        let deviation = matrix.hermiticity_deviation();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > STRUCTURAL_TOL || trace.im.abs() > STRUCTURAL_TOL {
            return Err(Error::BadTrace { trace: trace.re });
        }
        debug_assert!(matrix.is_positive_semidefinite(1e-9), "density operator is not positive");
        Ok(Self { matrix })
    }

    pub fn pure(ket: &Ket) -> Result<Self> {
        Self::new(projector(ket, true)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: Operator::identity(dim).scaled(c(1.0 / dim as f64)) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }
}

/// A measurement: Hermitian effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<Operator>,
}

impl Povm {
    pub fn new(effects: Vec<Operator>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidArgument("POVM needs at least one effect".into()))?;
        let dim = first.dim();
        let mut sum = Operator::zeros(dim);
        for effect in &effects {
            check_dim(dim, effect.dim())?;
            let deviation = effect.hermiticity_deviation();
            if deviation > STRUCTURAL_TOL {
                return Err(Error::NotHermitian { deviation });
            }
            sum = sum.add(effect)?;
        }
        let deviation = sum.max_abs_diff(&Operator::identity(dim))?;
        if deviation > STRUCTURAL_TOL {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(Self { dim, effects })
    }

    /// Projective measurement onto the given kets, in order.
    pub fn from_basis(kets: &[Ket]) -> Result<Self> {
        let effects = kets.iter().map(|k| projector(k, true)).collect::<Result<Vec<_>>>()?;
        Self::new(effects)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn probabilities(&self, state: &DensityOperator) -> Result<Vec<f64>> {
        self.effects.iter().map(|e| born_probability(e, state)).collect()
    }
}

/// Kronecker product with the row-major composite index convention.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl TensorProduct for Ket {
    fn tensor(&self, other: &Self) -> Self {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ket { amps }
    }
}

impl TensorProduct for Operator {
    fn tensor(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..na {
            for j in 0..na {
                let a = self.get(i, j);
                for k in 0..nb {
                    for l in 0..nb {
                        data[(i * nb + k) * n + (j * nb + l)] = a * other.get(k, l);
                    }
                }
            }
        }
        Operator { dim: n, data }
    }
}

impl TensorProduct for DensityOperator {
    fn tensor(&self, other: &Self) -> Self {
        // Products of unit-trace Hermitian operators stay unit-trace Hermitian.
        DensityOperator { matrix: self.matrix.tensor(&other.matrix) }
    }
}

pub fn tensor_product<T: TensorProduct>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Folds a non-empty list of factors left to right: ((f₀ ⊗ f₁) ⊗ f₂) ⊗ …
pub fn tensor_all<T: TensorProduct + Clone>(factors: &[T]) -> Option<T> {
    let (first, rest) = factors.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
}

/// |k⟩⟨k|. With `strict`, rejects kets that are not normalized.
pub fn projector(k: &Ket, strict: bool) -> Result<Operator> {
    if strict && !k.is_normalized() {
        return Err(Error::NotNormalized { norm_sqr: k.norm_sqr() });
    }
    Operator::outer(k, k)
}

/// Re Tr[effect · state]; the imaginary part must vanish to within 1e-10.
pub fn born_probability(effect: &Operator, state: &DensityOperator) -> Result<f64> {
    let rho = state.matrix();
    check_dim(effect.dim(), rho.dim())?;
    let n = effect.dim();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += effect.get(i, j) * rho.get(j, i);
        }
    }
    if tr.im.abs() >= CROSS_CHECK_TOL {
        return Err(Error::NonRealProbability { imag: tr.im });
    }
    Ok(tr.re)
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
