//! Cartan-basis generators of su(d), spin operators, collective operators
//! on the `n`-fold tensor product, single-particle spectra and their
//! transition (Bohr) frequencies.
//!
//! The generator basis splits into `d - 1` commuting diagonal matrices and
//! the matrix units `e_(i,j) = |i><j|` (`i != j`) as root operators; each
//! root operator is a simultaneous eigenvector of the adjoint action of
//! every diagonal generator.  All structure constants are computed from
//! the explicit matrices rather than assumed, and the unit tests pin the
//! standard low-dimensional values.

use crate::error::{Error, Result};
use crate::numerics::CMat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Ordered index pair `(i, j)` labelling the root operator `|i><j|`
/// (zero-based).  The conjugate root is `(j, i)`.
pub type Root = (usize, usize);

/// Hard cap on the tensor-product dimension `d^n` accepted by
/// [`collective_operator`] and everything downstream of it.
pub const MAX_TENSOR_DIMENSION: usize = 1 << 14;

/// Cartan-style generator basis of su(d): commuting diagonal generators
/// plus matrix-unit root operators.
///
/// For `d = 2` the diagonal generator is `s_z = diag(1/2, -1/2)` (the spin
/// convention); for `d >= 3` the diagonal generators are the generalized
/// Gell-Mann diagonal matrices `sqrt(2/(l(l+1))) diag(1, ..., 1, -l, 0, ...)`,
/// which for `d = 3` are exactly `diag(1,-1,0)` and `diag(1,1,-2)/sqrt(3)`.
#[derive(Clone, Debug)]
pub struct CartanBasis {
    d: usize,
    diag: Vec<DVector<f64>>,
}

impl CartanBasis {
    /// Builds the basis for su(d), `d >= 2`.
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput("su(d) needs d >= 2".into()));
        }
        let diag = if d == 2 {
            vec![DVector::from_vec(vec![0.5, -0.5])]
        } else {
            (1..d)
                .map(|l| {
                    let norm = (2.0 / (l as f64 * (l + 1) as f64)).sqrt();
                    DVector::from_fn(d, |j, _| {
                        if j < l {
                            norm
                        } else if j == l {
                            -norm * l as f64
                        } else {
                            0.0
                        }
                    })
                })
                .collect()
        };
        Ok(Self { d, diag })
    }

    /// Local dimension `d`.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of diagonal generators, `d - 1`.
    pub fn num_diag(&self) -> usize {
        self.d - 1
    }

    /// Diagonal of the `k`-th commuting generator.
    pub fn diag_entries(&self, k: usize) -> &DVector<f64> {
        &self.diag[k]
    }

    /// The `k`-th commuting generator as a dense complex matrix.
    pub fn diag_generator(&self, k: usize) -> CMat {
        CMat::from_fn(self.d, self.d, |r, c| {
            if r == c {
                Complex64::new(self.diag[k][r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// The root operator `|i><j|`.
    pub fn root_operator(&self, (i, j): Root) -> CMat {
        let mut m = CMat::zeros(self.d, self.d);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    /// All roots `(i, j)`, `i != j`, in row-major order.
    pub fn roots(&self) -> Vec<Root> {
        let mut out = Vec::with_capacity(self.d * (self.d - 1));
        for i in 0..self.d {
            for j in 0..self.d {
                if i != j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The positive roots `(i, j)` with `i < j`.
    pub fn positive_roots(&self) -> Vec<Root> {
        self.roots().into_iter().filter(|&(i, j)| i < j).collect()
    }

    /// Generating set `(i, i+1)`: every other root operator is reached by
    /// nested commutators of these and their conjugates.
    pub fn generating_roots(&self) -> Vec<Root> {
        (0..self.d - 1).map(|i| (i, i + 1)).collect()
    }

    /// Adjoint eigenvalue vector of a root: component `k` is the
    /// eigenvalue of `[d_k, .]` on `e_(i,j)`, namely `d_k[i] - d_k[j]`.
    pub fn root_vector(&self, (i, j): Root) -> Vec<f64> {
        self.diag.iter().map(|h| h[i] - h[j]).collect()
    }

    /// Coefficients `M_k` in `[e_mu, e_(-mu)] = sum_k M_k d_k`, computed by
    /// solving the Gram system of the diagonal generators (the commutator
    /// of a matrix unit with its conjugate is diagonal and traceless, so
    /// the expansion is exact).
    pub fn cartan_bracket_coeffs(&self, (i, j): Root) -> Vec<f64> {
        let p = self.num_diag();
        let gram = DMatrix::<f64>::from_fn(p, p, |a, b| self.diag[a].dot(&self.diag[b]));
        let mut target = DVector::<f64>::zeros(self.d);
        target[i] = 1.0;
        target[j] = -1.0;
        let rhs = DVector::<f64>::from_fn(p, |a, _| self.diag[a].dot(&target));
        let sol = gram
            .lu()
            .solve(&rhs)
            .expect("Gram matrix of independent generators is invertible");
        sol.iter().cloned().collect()
    }

    /// Expansion matrix `q` with `q[k][j] = d_k[j]`: a single-particle
    /// Hamiltonian `h = sum_k a_k d_k` has level `j` energy
    /// `sum_k a_k q[k][j]`.
    pub fn expansion_coeffs(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.num_diag(), self.d, |k, j| self.diag[k][j])
    }

    /// Coefficients `a` with `spectrum[j] = sum_k a_k d_k[j]`, solved
    /// through the Gram system (exact because the spectrum is traceless
    /// and the diagonal generators span the traceless diagonals).
    pub fn spectrum_coeffs(&self, spectrum: &SpectrumSpec) -> Result<Vec<f64>> {
        if spectrum.num_levels() != self.d {
            return Err(Error::InvalidInput(format!(
                "spectrum has {} levels but the basis is su({})",
                spectrum.num_levels(),
                self.d
            )));
        }
        let p = self.num_diag();
        let gram = DMatrix::<f64>::from_fn(p, p, |a, b| self.diag[a].dot(&self.diag[b]));
        let eps = DVector::from_column_slice(spectrum.levels());
        let rhs = DVector::<f64>::from_fn(p, |a, _| self.diag[a].dot(&eps));
        let sol = gram
            .lu()
            .solve(&rhs)
            .expect("Gram matrix of independent generators is invertible");
        Ok(sol.iter().cloned().collect())
    }
}

/// Spin matrices for a single spin of size `s` (`two_s = 2s`), in the
/// standard basis ordered by decreasing magnetic quantum number,
/// `S_z = diag(s, s-1, ..., -s)`.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    /// Twice the spin size.
    pub two_s: u32,
    /// `S_z`.
    pub sz: CMat,
    /// Raising operator `S_+`.
    pub sp: CMat,
    /// Lowering operator `S_- = S_+^dagger`.
    pub sm: CMat,
    /// `S_x = (S_+ + S_-)/2`.
    pub sx: CMat,
    /// `S_y = (S_+ - S_-)/(2i)`.
    pub sy: CMat,
}

/// Builds the spin matrices for `2s = two_s >= 1`.
pub fn spin_operators(two_s: u32) -> Result<SpinOperators> {
    if two_s == 0 {
        return Err(Error::InvalidInput("spin operators need s >= 1/2".into()));
    }
    let dim = (two_s + 1) as usize;
    let s = two_s as f64 / 2.0;
    let m_of = |idx: usize| s - idx as f64;
    let sz = CMat::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(m_of(r), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut sp = CMat::zeros(dim, dim);
    for col in 1..dim {
        let m = m_of(col);
        sp[(col - 1, col)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * Complex64::new(0.5, 0.0);
    let sy = (&sp - &sm) * Complex64::new(0.0, -0.5);
    Ok(SpinOperators {
        two_s,
        sz,
        sp,
        sm,
        sx,
        sy,
    })
}

/// Single-particle spectrum: levels sorted ascending and shifted to zero
/// mean.  The applied shift is recorded so callers can report it.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSpec {
    levels: Vec<f64>,
    shift: f64,
}

impl SpectrumSpec {
    /// Normalizes raw levels: sorts ascending and removes the mean.
    /// Degenerate levels are allowed; non-finite entries and fewer than
    /// two levels are rejected.
    pub fn new(mut levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidInput(
                "a spectrum needs at least two levels".into(),
            ));
        }
        if levels.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("spectrum levels must be finite".into()));
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let shift = levels.iter().sum::<f64>() / levels.len() as f64;
        for x in &mut levels {
            *x -= shift;
        }
        Ok(Self { levels, shift })
    }

    /// Equally spaced ladder with unit gaps, `k - (d+1)/2` for `k = 1..d`.
    pub fn ladder(d: usize) -> Result<Self> {
        Self::new((1..=d).map(|k| k as f64).collect())
    }

    /// Maximal-variance two-level spectrum with total width `d - 1`:
    /// `floor(d/2)` levels at the bottom and `ceil(d/2)` at the top.  For
    /// even `d` this is the variance optimum among spectra of that width;
    /// for odd `d` the two ways of placing the odd level tie, and the
    /// top-heavy one is returned.
    pub fn two_level(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(
                "two-level spectrum needs d >= 2".into(),
            ));
        }
        let low = d / 2;
        let mut levels = vec![0.0; low];
        levels.extend(std::iter::repeat((d - 1) as f64).take(d - low));
        Self::new(levels)
    }

    /// Spectrum of `h = sum_k a_k d_k` in the given basis.
    pub fn from_coeffs(basis: &CartanBasis, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != basis.num_diag() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for su({})",
                basis.num_diag(),
                basis.dim()
            )));
        }
        let levels = (0..basis.dim())
            .map(|j| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * basis.diag_entries(k)[j])
                    .sum()
            })
            .collect();
        Self::new(levels)
    }

    /// Levels, ascending and traceless.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of levels `d`.
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Mean removed from the raw input during normalization.
    pub fn applied_shift(&self) -> f64 {
        self.shift
    }

    /// Spectral variance `<<eps^2>> = (1/d) sum_j eps_j^2` (the mean is
    /// zero by construction).
    pub fn variance(&self) -> f64 {
        self.levels.iter().map(|x| x * x).sum::<f64>() / self.levels.len() as f64
    }

    /// The single-particle Hamiltonian `diag(eps_1, ..., eps_d)`.
    pub fn hamiltonian(&self) -> CMat {
        let d = self.levels.len();
        CMat::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(self.levels[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// Transition frequencies of a spectrum: `omega_(i,j) = eps_i - eps_j` for
/// every root `(i, j)`.
pub fn bohr_frequencies(spectrum: &SpectrumSpec) -> BTreeMap<Root, f64> {
    let d = spectrum.num_levels();
    let mut out = BTreeMap::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                out.insert((i, j), spectrum.levels()[i] - spectrum.levels()[j]);
            }
        }
    }
    out
}

/// Sum of `x` acting on each tensor factor of `n` copies:
/// `X = sum_k 1 x ... x x x ... x 1`.
///
/// The result is a `d^n`-dimensional dense matrix; sizes beyond
/// [`MAX_TENSOR_DIMENSION`] are rejected.
pub fn collective_operator(x: &CMat, n: u32) -> Result<CMat> {
    let d = x.nrows();
    if d != x.ncols() || d < 2 {
        return Err(Error::InvalidInput(
            "collective operator needs a square d >= 2 matrix".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidInput(
            "collective operator needs n >= 1".into(),
        ));
    }
    let dim = (d as u64)
        .checked_pow(n)
        .filter(|&v| v <= MAX_TENSOR_DIMENSION as u64);
    let Some(dim) = dim else {
        return Err(Error::DimensionCap(format!(
            "tensor dimension {d}^{n} exceeds {MAX_TENSOR_DIMENSION}"
        )));
    };
    let dim = dim as usize;
    let n = n as usize;
    let mut out = CMat::zeros(dim, dim);
    // stride[k] = d^(n-1-k): the weight of slot k in the row index.
    let mut strides = vec![1usize; n];
    for k in (0..n - 1).rev() {
        strides[k] = strides[k + 1] * d;
    }
    for row in 0..dim {
        for &stride in &strides {
            let digit = (row / stride) % d;
            let base = row - digit * stride;
            for to in 0..d {
                let x_entry = x[(digit, to)];
                if x_entry != Complex64::new(0.0, 0.0) {
                    // Entry <row| X |col> picks up x[digit, to] where col
                    // replaces slot k's digit by `to`.
                    out[(row, base + to * stride)] += x_entry;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::commutator;
    use approx::assert_relative_eq;

    fn frob(m: &CMat) -> f64 {
        m.norm()
    }

    #[test]
    fn su2_basis_uses_the_spin_convention() {
        let b = CartanBasis::new(2).unwrap();
        assert_eq!(b.num_diag(), 1);
        assert_eq!(b.diag_entries(0).as_slice(), &[0.5, -0.5]);
        assert_eq!(b.root_vector((0, 1)), vec![1.0]);
        assert_eq!(b.root_vector((1, 0)), vec![-1.0]);
        // [e_+, e_-] = 2 s_z
        assert_eq!(b.cartan_bracket_coeffs((0, 1)), vec![2.0]);
    }

    #[test]
    fn su3_basis_matches_the_gell_mann_diagonals() {
        let b = CartanBasis::new(3).unwrap();
        let h1 = b.diag_entries(0);
        let h2 = b.diag_entries(1);
        assert_relative_eq!(h1[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(h1[1], -1.0, max_relative = 1e-15);
        assert_relative_eq!(h1[2], 0.0, epsilon = 1e-15);
        let s3 = 3.0_f64.sqrt();
        assert_relative_eq!(h2[0], 1.0 / s3, max_relative = 1e-15);
        assert_relative_eq!(h2[1], 1.0 / s3, max_relative = 1e-15);
        assert_relative_eq!(h2[2], -2.0 / s3, max_relative = 1e-15);
        // Adjoint eigenvalues of the two simple positive roots.
        let v01 = b.root_vector((0, 1));
        assert_relative_eq!(v01[0], 2.0, max_relative = 1e-15);
        assert_relative_eq!(v01[1], 0.0, epsilon = 1e-15);
        let v02 = b.root_vector((0, 2));
        assert_relative_eq!(v02[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(v02[1], s3, max_relative = 1e-15);
        // [e_(0,2), e_(2,0)] = Lambda_3 / 2 + sqrt(3)/2 Lambda_8
        let m = b.cartan_bracket_coeffs((0, 2));
        assert_relative_eq!(m[0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(m[1], s3 / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn root_operators_are_adjoint_eigenvectors() {
        for d in 2..=5usize {
            let b = CartanBasis::new(d).unwrap();
            for root in b.roots() {
                let e = b.root_operator(root);
                let v = b.root_vector(root);
                for k in 0..b.num_diag() {
                    let lhs = commutator(&b.diag_generator(k), &e);
                    let rhs = &e * Complex64::new(v[k], 0.0);
                    assert!(frob(&(lhs - rhs)) < 1e-13, "d={d} root={root:?} k={k}");
                }
                // Conjugate root has the negated eigenvalue vector.
                let vc = b.root_vector((root.1, root.0));
                for k in 0..b.num_diag() {
                    assert_relative_eq!(vc[k], -v[k], epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn bracket_with_conjugate_root_lies_in_the_cartan_span() {
        for d in 2..=5usize {
            let b = CartanBasis::new(d).unwrap();
            for root in b.roots() {
                let e = b.root_operator(root);
                let lhs = commutator(&e, &b.root_operator((root.1, root.0)));
                let coeffs = b.cartan_bracket_coeffs(root);
                let mut rhs = CMat::zeros(d, d);
                for (k, &c) in coeffs.iter().enumerate() {
                    rhs += b.diag_generator(k) * Complex64::new(c, 0.0);
                }
                assert!(frob(&(lhs - rhs)) < 1e-13, "d={d} root={root:?}");
            }
        }
    }

    #[test]
    fn nested_commutators_of_the_generating_set_reach_every_root() {
        for d in 2..=5usize {
            let b = CartanBasis::new(d).unwrap();
            // e_(i,j) for j > i + 1 arises as [e_(i,k), e_(k,j)]; walk
            // outward from the superdiagonal.
            for i in 0..d {
                for j in 0..d {
                    if i == j || j.abs_diff(i) == 1 {
                        continue;
                    }
                    let k = if j > i { j - 1 } else { j + 1 };
                    let built = commutator(&b.root_operator((i, k)), &b.root_operator((k, j)));
                    assert!(
                        frob(&(built - b.root_operator((i, j)))) < 1e-15,
                        "d={d} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn spin_half_matrices_are_half_the_paulis() {
        let ops = spin_operators(1).unwrap();
        assert_relative_eq!(ops.sz[(0, 0)].re, 0.5, max_relative = 1e-15);
        assert_relative_eq!(ops.sx[(0, 1)].re, 0.5, max_relative = 1e-15);
        assert_relative_eq!(ops.sy[(0, 1)].im, -0.5, max_relative = 1e-15);
        assert_relative_eq!(ops.sp[(0, 1)].re, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn spin_one_ladder_elements() {
        let ops = spin_operators(2).unwrap();
        let r = 0.5_f64.sqrt();
        // S_x off-diagonals are 1/sqrt(2) for s = 1.
        assert_relative_eq!(ops.sx[(0, 1)].re, r, max_relative = 1e-15);
        assert_relative_eq!(ops.sx[(1, 2)].re, r, max_relative = 1e-15);
        assert_relative_eq!(ops.sz[(1, 1)].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn spin_algebra_and_casimir() {
        for two_s in 1..=5u32 {
            let ops = spin_operators(two_s).unwrap();
            let s = two_s as f64 / 2.0;
            let i = Complex64::new(0.0, 1.0);
            assert!(frob(&(commutator(&ops.sx, &ops.sy) - &ops.sz * i)) < 1e-13);
            assert!(frob(&(commutator(&ops.sz, &ops.sp) - &ops.sp)) < 1e-13);
            let casimir = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz;
            let expect =
                CMat::identity(ops.sz.nrows(), ops.sz.nrows()) * Complex64::new(s * (s + 1.0), 0.0);
            assert!(frob(&(casimir - expect)) < 1e-13);
        }
    }

    #[test]
    fn spectrum_normalization_sorts_and_centres() {
        let spec = SpectrumSpec::new(vec![3.0, 0.0, 0.0]).unwrap();
        assert_eq!(spec.levels(), &[-1.0, -1.0, 2.0]);
        assert_relative_eq!(spec.applied_shift(), 1.0, max_relative = 1e-15);
        assert!(SpectrumSpec::new(vec![1.0]).is_err());
        assert!(SpectrumSpec::new(vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn ladder_and_two_level_spectra() {
        assert_eq!(SpectrumSpec::ladder(3).unwrap().levels(), &[-1.0, 0.0, 1.0]);
        assert_eq!(
            SpectrumSpec::two_level(4).unwrap().levels(),
            &[-1.5, -1.5, 1.5, 1.5]
        );
        let odd = SpectrumSpec::two_level(3).unwrap();
        assert_relative_eq!(odd.levels()[0], -4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(odd.levels()[1], 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(odd.levels()[2], 2.0 / 3.0, max_relative = 1e-14);
        // Ladder variance (d^2 - 1)/12.
        for d in 2..=7usize {
            let spec = SpectrumSpec::ladder(d).unwrap();
            assert_relative_eq!(
                spec.variance(),
                ((d * d - 1) as f64) / 12.0,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn spectrum_coefficients_roundtrip() {
        let b = CartanBasis::new(3).unwrap();
        let ladder = SpectrumSpec::ladder(3).unwrap();
        let a = b.spectrum_coeffs(&ladder).unwrap();
        // diag(-1, 0, 1) = -Lambda_3/2 - sqrt(3)/2 Lambda_8
        assert_relative_eq!(a[0], -0.5, max_relative = 1e-13);
        assert_relative_eq!(a[1], -3.0_f64.sqrt() / 2.0, max_relative = 1e-13);
        for d in 2..=5usize {
            let b = CartanBasis::new(d).unwrap();
            let spec =
                SpectrumSpec::new((0..d).map(|k| (k * k) as f64 * 0.3 - 1.0).collect()).unwrap();
            let a = b.spectrum_coeffs(&spec).unwrap();
            let rebuilt = SpectrumSpec::from_coeffs(&b, &a).unwrap();
            for (x, y) in rebuilt.levels().iter().zip(spec.levels()) {
                assert_relative_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bohr_frequencies_of_the_qutrit_ladder() {
        let spec = SpectrumSpec::ladder(3).unwrap();
        let omega = bohr_frequencies(&spec);
        assert_relative_eq!(omega[&(0, 1)], -1.0, max_relative = 1e-15);
        assert_relative_eq!(omega[&(1, 0)], 1.0, max_relative = 1e-15);
        assert_relative_eq!(omega[&(0, 2)], -2.0, max_relative = 1e-15);
        for (&(i, j), &w) in &omega {
            assert_relative_eq!(omega[&(j, i)], -w, epsilon = 1e-15);
        }
    }

    #[test]
    fn collective_operator_matches_explicit_kronecker_sum() {
        let ops = spin_operators(1).unwrap();
        let id = CMat::identity(2, 2);
        let expect = ops.sx.kronecker(&id) + id.kronecker(&ops.sx);
        let got = collective_operator(&ops.sx, 2).unwrap();
        assert!(frob(&(got - expect)) < 1e-14);

        let b = CartanBasis::new(3).unwrap();
        let e = b.root_operator((0, 2));
        let id3 = CMat::identity(3, 3);
        let expect = e.kronecker(&id3).kronecker(&id3)
            + id3.kronecker(&e).kronecker(&id3)
            + id3.kronecker(&id3).kronecker(&e);
        let got = collective_operator(&e, 3).unwrap();
        assert!(frob(&(got - expect)) < 1e-14);
    }

    #[test]
    fn collective_map_is_a_lie_homomorphism() {
        let b = CartanBasis::new(3).unwrap();
        let x = b.root_operator((0, 1));
        let y = b.root_operator((1, 2));
        let lhs = commutator(
            &collective_operator(&x, 3).unwrap(),
            &collective_operator(&y, 3).unwrap(),
        );
        let rhs = collective_operator(&commutator(&x, &y), 3).unwrap();
        assert!(frob(&(lhs - rhs)) < 1e-13);
    }

    #[test]
    fn collective_operator_respects_the_dimension_cap() {
        let ops = spin_operators(1).unwrap();
        assert!(collective_operator(&ops.sx, 14).is_ok());
        assert!(matches!(
            collective_operator(&ops.sx, 15),
            Err(Error::DimensionCap(_))
        ));
    }
}
