//! The su(n)/SU(n) matrix model: brackets, the normalized Killing form, adjoint actions,
//! the exponential map and symmetrized-trace invariant polynomials.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::coefficient::Coefficient;
use crate::formscalc::FormValue;

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance used when validating caller-supplied matrices.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-8;

fn i_unit() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn check_same(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// Σ_ij a_ij b_ji, i.e. trace(ab) without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// An element of su(n): anti-Hermitian and traceless.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    matrix: CMatrix,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        Self { matrix: CMatrix::zeros(n, n) }
    }

    /// Validates that `matrix` lies in su(n).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: matrix.ncols() });
        }
        let scale = 1.0 + matrix.norm();
        let herm = (&matrix + matrix.adjoint()).norm();
        if herm > MEMBERSHIP_TOLERANCE * scale {
            return Err(Error::NotInAlgebra(format!("anti-Hermitian defect {herm:e}")));
        }
        let tr = matrix.trace().norm();
        if tr > MEMBERSHIP_TOLERANCE * scale {
            return Err(Error::NotInAlgebra(format!("trace {tr:e}")));
        }
        Ok(Self { matrix })
    }

    /// Orthogonal projection of an arbitrary square matrix onto su(n).
    pub fn project(matrix: &CMatrix) -> Self {
        let n = matrix.nrows();
        let mut m = (matrix - matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let shift = m.trace() / Complex64::new(n as f64, 0.0);
        for i in 0..n {
            m[(i, i)] -= shift;
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The matrix size n.
    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    /// Generalized Gell-Mann basis scaled by −i/2, so that for n = 2 the elements are
    /// −(i/2)σₐ with [X₁, X₂] = X₃, and ⟨Xₐ, X_b⟩ = ½δ_ab for every n.
    pub fn basis(n: usize) -> Vec<Self> {
        let half_i = Complex64::new(0.0, -0.5);
        let mut out = Vec::with_capacity(n * n - 1);
        for j in 0..n {
            for k in j + 1..n {
                let mut sym = CMatrix::zeros(n, n);
                sym[(j, k)] = Complex64::new(1.0, 0.0);
                sym[(k, j)] = Complex64::new(1.0, 0.0);
                out.push(Self { matrix: sym * half_i });
                let mut anti = CMatrix::zeros(n, n);
                anti[(j, k)] = Complex64::new(0.0, -1.0);
                anti[(k, j)] = Complex64::new(0.0, 1.0);
                out.push(Self { matrix: anti * half_i });
            }
        }
        for l in 1..n {
            let c = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut diag = CMatrix::zeros(n, n);
            for j in 0..l {
                diag[(j, j)] = Complex64::new(c, 0.0);
            }
            diag[(l, l)] = Complex64::new(-c * l as f64, 0.0);
            out.push(Self { matrix: diag * half_i });
        }
        out
    }

    /// Σ cₐ eₐ over the supplied basis.
    pub fn combination(basis: &[Self], coefficients: &[f64]) -> Self {
        let n = basis.first().map(|b| b.rank()).unwrap_or(0);
        let mut out = Self::zero(n);
        for (b, &c) in basis.iter().zip(coefficients) {
            out.axpy(c, b);
        }
        out
    }

    /// Coordinates with respect to [`AlgebraElement::basis`].
    pub fn coordinates(&self) -> Vec<f64> {
        Self::basis(self.rank()).iter().map(|b| 2.0 * self.killing(b)).collect()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { matrix: &self.matrix * Complex64::new(s, 0.0) }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        assert_eq!(self.rank(), other.rank(), "su(n) rank mismatch");
        let c = Complex64::new(s, 0.0);
        for (a, b) in self.matrix.iter_mut().zip(other.matrix.iter()) {
            *a += c * b;
        }
    }

    /// Matrix commutator. Panics on a rank mismatch; see [`bracket`] for the checked form.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank(), "su(n) rank mismatch");
        let xy = &self.matrix * &other.matrix;
        let yx = &other.matrix * &self.matrix;
        Self { matrix: xy - yx }
    }

    /// ⟨X, Y⟩ = −trace(XY). Panics on a rank mismatch; see [`killing`] for the checked form.
    pub fn killing(&self, other: &Self) -> f64 {
        assert_eq!(self.rank(), other.rank(), "su(n) rank mismatch");
        -trace_of_product(&self.matrix, &other.matrix).re
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { matrix: &self.matrix + &rhs.matrix }
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { matrix: &self.matrix - &rhs.matrix }
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { matrix: -&self.matrix }
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        -&self
    }
}

impl Mul<&AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        rhs.scale(self)
    }
}

impl Mul<AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: AlgebraElement) -> AlgebraElement {
        rhs.scale(self)
    }
}

/// An element of SU(n).
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    matrix: CMatrix,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n) }
    }

    /// Validates unitarity and unit determinant.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { left: matrix.nrows(), right: matrix.ncols() });
        }
        let n = matrix.nrows();
        let defect = (matrix.adjoint() * &matrix - CMatrix::identity(n, n)).norm();
        if defect > MEMBERSHIP_TOLERANCE {
            return Err(Error::NotInGroup(format!("unitarity defect {defect:e}")));
        }
        let det = matrix.determinant();
        if (det - Complex64::new(1.0, 0.0)).norm() > MEMBERSHIP_TOLERANCE {
            return Err(Error::NotInGroup(format!("determinant {det}")));
        }
        Ok(Self { matrix })
    }

    /// Nearest special unitary matrix to a nearly unitary `matrix`: two Newton-Schulz polar
    /// steps followed by removal of the determinant phase.
    pub fn project(matrix: &CMatrix) -> Self {
        let n = matrix.nrows();
        let eye = CMatrix::identity(n, n);
        let mut u = matrix.clone();
        for _ in 0..2 {
            let correction = (&eye * Complex64::new(3.0, 0.0) - u.adjoint() * &u) * Complex64::new(0.5, 0.0);
            u = &u * correction;
        }
        let det = u.determinant();
        let phase = Complex64::from_polar(1.0, -det.arg() / n as f64);
        Self { matrix: u * phase }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// Ad(g)X = gXg⁻¹. Panics on a rank mismatch; see [`adjoint_group`] for the checked form.
    pub fn adjoint(&self, x: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.rank(), x.rank(), "SU(n) rank mismatch");
        AlgebraElement { matrix: &self.matrix * &x.matrix * self.matrix.adjoint() }
    }

    /// Frobenius distance between the defining matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// ‖g g† − 1‖ and |det g − 1| combined by maximum.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.rank();
        let u = (&self.matrix * self.matrix.adjoint() - CMatrix::identity(n, n)).norm();
        let d = (self.matrix.determinant() - Complex64::new(1.0, 0.0)).norm();
        u.max(d)
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.rank(), rhs.rank(), "SU(n) rank mismatch");
        GroupElement { matrix: &self.matrix * &rhs.matrix }
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        &self * &rhs
    }
}

pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    check_same(x.rank(), y.rank())?;
    Ok(x.bracket(y))
}

pub fn killing(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    check_same(x.rank(), y.rank())?;
    Ok(x.killing(y))
}

pub fn adjoint_group(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    check_same(g.rank(), x.rank())?;
    Ok(g.adjoint(x))
}

/// Matrix exponential (scaling and squaring with Padé approximants).
pub fn exponential(x: &AlgebraElement) -> GroupElement {
    GroupElement { matrix: x.matrix.exp() }
}

/// A symmetrized-trace invariant polynomial of degree k with a scalar normalization c:
/// f(X₁,…,X_k) = c · (1/k!) Σ_σ Re[(−i)^k trace(X_σ(1)⋯X_σ(k))].
///
/// The factor (−i)^k makes the symmetrized trace of anti-Hermitian arguments real; for k = 2
/// the unnormalized value is exactly the Killing form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantPolynomial {
    degree: usize,
    normalization: f64,
}

impl InvariantPolynomial {
    pub fn new(degree: usize, normalization: f64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Degree("invariant polynomial degree must be positive".into()));
        }
        Ok(Self { degree, normalization })
    }

    /// −(1/8π²)⟨X, Y⟩, the polynomial whose Chern-Weil form is the first Pontryagin form.
    pub fn pontryagin() -> Self {
        Self { degree: 2, normalization: -1.0 / (8.0 * PI * PI) }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { degree: self.degree, normalization: self.normalization * c }
    }

    /// Unchecked evaluation used in inner loops; arguments must number `degree` and share n.
    pub(crate) fn eval_unchecked(&self, args: &[&AlgebraElement]) -> f64 {
        let k = self.degree;
        if k == 1 {
            let t = args[0].matrix.trace();
            return self.normalization * (t * (-i_unit())).re;
        }
        // trace is cyclic, so permutations fixing the first slot cover every class k times
        let mut rest: Vec<usize> = (1..k).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut visit = |order: &[usize]| {
            let mut prod = args[0].matrix.clone();
            for &idx in &order[..order.len() - 1] {
                prod = prod * &args[idx].matrix;
            }
            acc += trace_of_product(&prod, &args[order[order.len() - 1]].matrix);
        };
        permute(&mut rest, 0, &mut visit);
        let phase = (-i_unit()).powu(k as u32);
        let count = factorial(k - 1);
        self.normalization * (acc * phase).re / count
    }
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

pub fn eval_invariant_polynomial(f: &InvariantPolynomial, args: &[&AlgebraElement]) -> Result<f64> {
    if args.len() != f.degree {
        return Err(Error::Arity { expected: f.degree, found: args.len() });
    }
    let n = args[0].rank();
    for a in args {
        check_same(n, a.rank())?;
    }
    Ok(f.eval_unchecked(args))
}

/// Residual of the graded expansion
/// f([φ₁, A], φ₂, …, φ_k) = Σ_{j≥2} (−1)^{p(q₂+…+q_{j−1})} f(φ₁, …, [A, φ_j], …, φ_k),
/// where p = deg A and q_j = deg φ_j, evaluated on pointwise form values sharing one chart.
pub fn check_ad_invariance_identity(
    f: &InvariantPolynomial,
    forms: &[FormValue<AlgebraElement>],
    a: &FormValue<AlgebraElement>,
) -> Result<f64> {
    let k = f.degree;
    if forms.len() != k {
        return Err(Error::Arity { expected: k, found: forms.len() });
    }
    let dim = a.dim();
    for phi in forms {
        check_same(dim, phi.dim())?;
    }
    let total: usize = a.degree() + forms.iter().map(|p| p.degree()).sum::<usize>();
    if total > dim {
        return Err(Error::Degree(format!("total degree {total} exceeds chart dimension {dim}")));
    }
    let eval = |args: &[&AlgebraElement]| f.eval_unchecked(args);
    let p = a.degree();

    let mut lhs_args: Vec<FormValue<AlgebraElement>> = forms.to_vec();
    lhs_args[0] = forms[0].wedge_bracket(a);
    let lhs = FormValue::multilinear(&lhs_args.iter().collect::<Vec<_>>(), eval);

    let mut rhs = lhs.zero_like();
    let mut shifted_degree = 0;
    for j in 1..k {
        let mut args: Vec<FormValue<AlgebraElement>> = forms.to_vec();
        args[j] = a.wedge_bracket(&forms[j]);
        let term = FormValue::multilinear(&args.iter().collect::<Vec<_>>(), eval);
        let sign = if (p * shifted_degree) % 2 == 0 { 1.0 } else { -1.0 };
        rhs.add_scaled(&term, sign);
        shifted_degree += forms[j].degree();
    }
    Ok(lhs.difference(&rhs).magnitude())
}
