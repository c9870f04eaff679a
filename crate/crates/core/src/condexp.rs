//! Conditional expectations on finite atomic measure spaces and the weighted
//! conditional type operators `T = M_w E M_u`.
//!
//! A sub-σ-algebra is a partition of the atoms into blocks, and `E` averages
//! over each block with the atom masses as weights. Matrices act on
//! coordinates in the orthonormal basis `eᵢ/√μᵢ` of `L²(μ)`, so adjoints are
//! plain conjugate transposes.
//!
//! On a block `B` with normalised measure `ν = μ/μ(B)` the operator is the
//! rank-one map `f ↦ w⟨f, ū⟩_ν`, which makes every class question a
//! comparison of rank-one blocks. Those exact criteria are reported next to
//! the printed ones.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, is_psd, matpow, operator_norm, svd_rank_spaces, ComplexMatrix, C64,
    DEFAULT_RANK_TOL,
};
use crate::posinormal::{self, ClassQuery};
use crate::random;

/// Relative threshold for supports: `|v| > SUPPORT_TOL · max|v|`.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteMeasureSpace {
    masses: Vec<f64>,
    labels: Vec<String>,
}

impl FiniteMeasureSpace {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        let labels = (0..masses.len()).map(|i| format!("x{i}")).collect();
        Self::with_labels(masses, labels)
    }

    pub fn with_labels(masses: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::invalid("atoms", "at least one atom is required"));
        }
        if labels.len() != masses.len() {
            return Err(Error::invalid("atoms", "one label per atom is required"));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid(format!("atoms[{i}].mass"), format!("mass must be positive, got {m}")));
            }
        }
        Ok(Self { masses, labels })
    }

    /// `count` atoms of mass `1/count`.
    pub fn uniform(count: usize) -> Result<Self> {
        Self::new(vec![1.0 / count as f64; count])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `∫ f dμ` over the given atoms.
    pub fn integral(&self, f: &MeasurableFunction, atoms: &[usize]) -> C64 {
        atoms.iter().map(|&i| f.values[i] * self.masses[i]).sum()
    }

    /// Coordinates `fᵢ√μᵢ` in the orthonormal atom basis.
    pub fn to_orthonormal(&self, f: &MeasurableFunction) -> Vec<C64> {
        f.values.iter().zip(&self.masses).map(|(v, m)| v * m.sqrt()).collect()
    }

    pub fn from_orthonormal(&self, coords: &[C64]) -> MeasurableFunction {
        MeasurableFunction {
            values: coords.iter().zip(&self.masses).map(|(v, m)| v / m.sqrt()).collect(),
        }
    }
}

/// Disjoint nonempty blocks covering every atom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
    #[serde(skip)]
    block_of: Vec<usize>,
}

impl BlockPartition {
    pub fn new(blocks: Vec<Vec<usize>>, atom_count: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("partition", "at least one block is required"));
        }
        let mut block_of = vec![usize::MAX; atom_count];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid(format!("partition[{b}]"), "block is empty"));
            }
            for (j, &atom) in block.iter().enumerate() {
                if atom >= atom_count {
                    return Err(Error::invalid(
                        format!("partition[{b}][{j}]"),
                        format!("atom index {atom} out of range for {atom_count} atoms"),
                    ));
                }
                if block_of[atom] != usize::MAX {
                    return Err(Error::invalid(
                        format!("partition[{b}][{j}]"),
                        format!("atom {atom} already belongs to block {}", block_of[atom]),
                    ));
                }
                block_of[atom] = b;
            }
        }
        if let Some(missing) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::invalid("partition", format!("atom {missing} is not covered")));
        }
        Ok(Self { blocks, block_of })
    }

    /// The single block `{0, …, n−1}`.
    pub fn trivial(atom_count: usize) -> Self {
        Self::new(vec![(0..atom_count).collect()], atom_count).expect("valid partition")
    }

    /// Every atom in its own block.
    pub fn discrete(atom_count: usize) -> Self {
        Self::new((0..atom_count).map(|i| vec![i]).collect(), atom_count).expect("valid partition")
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn atom_count(&self) -> usize {
        self.block_of.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurableFunction {
    #[serde(serialize_with = "crate::io::serialize_vector")]
    values: Vec<C64>,
}

impl MeasurableFunction {
    pub fn new(space: &FiniteMeasureSpace, values: Vec<C64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} values, found {}", space.len(), values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid(format!("values[{i}]"), "value is not finite"));
        }
        Ok(Self { values })
    }

    pub fn from_fn(space: &FiniteMeasureSpace, f: impl FnMut(usize) -> C64) -> Self {
        Self {
            values: (0..space.len()).map(f).collect(),
        }
    }

    pub fn constant(space: &FiniteMeasureSpace, c: C64) -> Self {
        Self::from_fn(space, |_| c)
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn abs_sq(&self) -> Self {
        self.map(|z| z.norm_sqr().into())
    }

    /// Atoms with `|f| > SUPPORT_TOL · max|f|`.
    pub fn support(&self) -> Vec<bool> {
        support_mask(&self.values.iter().map(|z| z.norm()).collect::<Vec<_>>())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn support_mask(abs: &[f64]) -> Vec<bool> {
    let top = abs.iter().copied().fold(0.0, f64::max);
    abs.iter().map(|&a| a > SUPPORT_TOL * top && a > 0.0).collect()
}

/// `(Σ_{i∈B} fᵢμᵢ)/μ(B)` for each block `B`.
pub fn block_means(space: &FiniteMeasureSpace, partition: &BlockPartition, f: &MeasurableFunction) -> Vec<C64> {
    partition
        .blocks()
        .iter()
        .map(|b| {
            let mass: f64 = b.iter().map(|&i| space.masses[i]).sum();
            space.integral(f, b) / mass
        })
        .collect()
}

pub fn conditional_expectation(
    space: &FiniteMeasureSpace,
    partition: &BlockPartition,
    f: &MeasurableFunction,
) -> MeasurableFunction {
    let means = block_means(space, partition, f);
    MeasurableFunction::from_fn(space, |i| means[partition.block_of(i)])
}

/// Matrix of `M_a E M_b`: entry `aᵢ bⱼ √(μᵢμⱼ)/μ(B)` for `i, j` in a common block.
pub fn weighted_expectation_matrix(
    space: &FiniteMeasureSpace,
    partition: &BlockPartition,
    a: &[C64],
    b: &[C64],
) -> ComplexMatrix {
    let n = space.len();
    let block_mass: Vec<f64> = partition
        .blocks()
        .iter()
        .map(|blk| blk.iter().map(|&i| space.masses[i]).sum())
        .collect();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let (bi, bj) = (partition.block_of(i), partition.block_of(j));
        if bi != bj {
            return C64::new(0.0, 0.0);
        }
        a[i] * b[j] * ((space.masses[i] * space.masses[j]).sqrt() / block_mass[bi])
    })
}

/// The orthogonal projector `E` onto blockwise-constant functions.
pub fn expectation_matrix(space: &FiniteMeasureSpace, partition: &BlockPartition) -> ComplexMatrix {
    let ones = vec![C64::new(1.0, 0.0); space.len()];
    weighted_expectation_matrix(space, partition, &ones, &ones)
}

/// Atoms, partition and weights of a weighted conditional type operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Setup {
    pub space: FiniteMeasureSpace,
    pub partition: BlockPartition,
    pub w: MeasurableFunction,
    pub u: MeasurableFunction,
}

impl Setup {
    pub fn build(&self) -> Result<WeightedConditionalOperator> {
        build_operator(&self.space, &self.partition, &self.w, &self.u)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    /// False when the input does not meet the property's hypothesis.
    pub applicable: bool,
    pub holds: bool,
    /// Largest `lhs − rhs` over atoms; non-positive when the inequality is strict.
    pub max_violation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EPropertyReport {
    pub p: f64,
    pub properties: Vec<PropertyResult>,
}

impl EPropertyReport {
    pub fn all_hold(&self) -> bool {
        self.properties.iter().all(|p| !p.applicable || p.holds)
    }
}

fn inequality(name: &'static str, lhs: &[f64], rhs: &[f64], tol: f64) -> PropertyResult {
    let mut max_violation = f64::NEG_INFINITY;
    let mut holds = true;
    for (&l, &r) in lhs.iter().zip(rhs) {
        let v = l - r;
        max_violation = max_violation.max(v);
        if v > tol * l.abs().max(r.abs()).max(1.0) {
            holds = false;
        }
    }
    PropertyResult {
        name,
        applicable: true,
        holds,
        max_violation,
    }
}

/// Atomwise checks of the basic properties of `E`:
/// module property `E(gf) = gE(f)` for blockwise-constant `g`, positivity,
/// `|E(f)|ᵖ ≤ E(|f|ᵖ)`, conditional Hölder with conjugate exponent `q`, and
/// conditional Jensen for `ψ(t) = t²` on real parts.
pub fn check_e_properties(
    space: &FiniteMeasureSpace,
    partition: &BlockPartition,
    f: &MeasurableFunction,
    g: &MeasurableFunction,
    p: f64,
    tol: f64,
) -> Result<EPropertyReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidQuery(format!("p must be at least 1, got {p}")));
    }
    let e = |h: &MeasurableFunction| conditional_expectation(space, partition, h);
    let abs_pow = |h: &MeasurableFunction, r: f64| h.map(|z| z.norm().powf(r).into());
    let re = |h: &MeasurableFunction| -> Vec<f64> { h.values.iter().map(|z| z.re).collect() };
    let mut properties = Vec::with_capacity(5);

    let eg = e(g);
    let g_scale = g.max_abs().max(1.0);
    let g_constant = g.values.iter().zip(&eg.values).all(|(a, b)| (a - b).norm() <= tol * g_scale);
    let lhs = e(&g.mul(f));
    let rhs = g.mul(&e(f));
    let dev = lhs
        .values
        .iter()
        .zip(&rhs.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    properties.push(PropertyResult {
        name: "module",
        applicable: g_constant,
        holds: dev <= tol * (g_scale * f.max_abs()).max(1.0),
        max_violation: dev,
    });

    let ef_abs = e(&abs_pow(f, 1.0));
    let neg: Vec<f64> = ef_abs.values.iter().map(|z| -z.re).collect();
    properties.push(inequality("positivity", &neg, &vec![0.0; neg.len()], tol));

    let lhs: Vec<f64> = e(f).values.iter().map(|z| z.norm().powf(p)).collect();
    let rhs = re(&e(&abs_pow(f, p)));
    properties.push(inequality("power", &lhs, &rhs, tol));

    let lhs = re(&e(&abs_pow(&f.mul(g), 1.0)));
    let fp = re(&e(&abs_pow(f, p))).into_iter().map(|v| v.max(0.0).powf(1.0 / p));
    let rhs: Vec<f64> = if p == 1.0 {
        // q = ∞: blockwise essential supremum of |g|
        let sup: Vec<f64> = partition
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&i| g.values[i].norm()).fold(0.0, f64::max))
            .collect();
        fp.enumerate().map(|(i, a)| a * sup[partition.block_of(i)]).collect()
    } else {
        let q = p / (p - 1.0);
        let gq = re(&e(&abs_pow(g, q)));
        fp.zip(gq).map(|(a, b)| a * b.max(0.0).powf(1.0 / q)).collect()
    };
    properties.push(inequality("holder", &lhs, &rhs, tol));

    let real = f.map(|z| z.re.into());
    let lhs: Vec<f64> = e(&real).values.iter().map(|z| z.re * z.re).collect();
    let rhs = re(&e(&real.map(|z| (z.re * z.re).into())));
    properties.push(inequality("jensen", &lhs, &rhs, tol));

    Ok(EPropertyReport { p, properties })
}

/// Blockwise conditional expectations entering every criterion.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockStats {
    pub mass: f64,
    /// `E(|w|²)`
    pub ew: f64,
    /// `E(|u|²)`
    pub eu: f64,
    #[serde(serialize_with = "ser_c64")]
    pub e_u: C64,
    #[serde(serialize_with = "ser_c64")]
    pub e_w: C64,
    #[serde(serialize_with = "ser_c64")]
    pub e_uw: C64,
    /// Block lies in `S(E(|u|²))`.
    pub in_s: bool,
    /// Block lies in `G = S(E(|w|²))`.
    pub in_g: bool,
    /// Block lies in `S' = S(E(u))`.
    pub in_s_prime: bool,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&crate::io::pair(*z), s)
}

impl BlockStats {
    /// `1 − |E(uw)|²/(E|w|² E|u|²)`: zero iff `w` is parallel to `ū` on the block.
    pub fn parallel_defect(&self) -> f64 {
        let denom = self.ew * self.eu;
        if denom == 0.0 {
            0.0
        } else {
            (1.0 - self.e_uw.norm_sqr() / denom).max(0.0)
        }
    }
}

/// `x^e` with `x` off its support read as zero and `0⁰ = 1`; negative powers
/// of zero vanish, matching the χ-factor convention.
fn chi_pow(x: f64, on_support: bool, e: i32) -> f64 {
    if e == 0 {
        1.0
    } else if on_support {
        x.powi(e)
    } else {
        0.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedConditionalOperator {
    pub space: FiniteMeasureSpace,
    pub partition: BlockPartition,
    pub w: MeasurableFunction,
    pub u: MeasurableFunction,
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub matrix: ComplexMatrix,
}

pub fn build_operator(
    space: &FiniteMeasureSpace,
    partition: &BlockPartition,
    w: &MeasurableFunction,
    u: &MeasurableFunction,
) -> Result<WeightedConditionalOperator> {
    if partition.atom_count() != space.len() {
        return Err(Error::invalid(
            "partition",
            format!("covers {} atoms, space has {}", partition.atom_count(), space.len()),
        ));
    }
    for (field, f) in [("w", w), ("u", u)] {
        if f.values.len() != space.len() {
            return Err(Error::invalid(
                field,
                format!("expected {} values, found {}", space.len(), f.values.len()),
            ));
        }
    }
    let matrix = weighted_expectation_matrix(space, partition, &w.values, &u.values);
    Ok(WeightedConditionalOperator {
        space: space.clone(),
        partition: partition.clone(),
        w: w.clone(),
        u: u.clone(),
        matrix,
    })
}

impl WeightedConditionalOperator {
    /// `w · E(u f)`.
    pub fn apply(&self, f: &MeasurableFunction) -> MeasurableFunction {
        self.w.mul(&conditional_expectation(&self.space, &self.partition, &self.u.mul(f)))
    }

    /// Largest `‖T̂ f̂ − (w E(uf))^‖` over `trials` random complex `f`.
    pub fn action_residual<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> f64 {
        (0..trials)
            .map(|_| {
                let f = MeasurableFunction::from_fn(&self.space, |_| random::complex_gaussian(rng));
                let lhs = self.matrix.matvec(&self.space.to_orthonormal(&f));
                let rhs = self.space.to_orthonormal(&self.apply(&f));
                lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn block_stats(&self) -> Vec<BlockStats> {
        let means = |f: &MeasurableFunction| block_means(&self.space, &self.partition, f);
        let ew: Vec<f64> = means(&self.w.abs_sq()).iter().map(|z| z.re).collect();
        let eu: Vec<f64> = means(&self.u.abs_sq()).iter().map(|z| z.re).collect();
        let e_u = means(&self.u);
        let e_w = means(&self.w);
        let e_uw = means(&self.u.mul(&self.w));
        let (s, g) = (support_mask(&eu), support_mask(&ew));
        let s_prime = support_mask(&e_u.iter().map(|z| z.norm()).collect::<Vec<_>>());
        self.partition
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, atoms)| BlockStats {
                mass: atoms.iter().map(|&i| self.space.masses[i]).sum(),
                ew: ew[b],
                eu: eu[b],
                e_u: e_u[b],
                e_w: e_w[b],
                e_uw: e_uw[b],
                in_s: s[b],
                in_g: g[b],
                in_s_prime: s_prime[b],
            })
            .collect()
    }

    /// Per-atom values of a blockwise quantity.
    fn spread(&self, per_block: &[f64]) -> Vec<f64> {
        (0..self.space.len()).map(|i| per_block[self.partition.block_of(i)]).collect()
    }
}

/// Exact blockwise membership at `(k, n, λ)`.
///
/// On a block `T = |w⟩⟨ū|` in `L²(ν)`; with `a = E(uw)` this gives
/// `T*T = E|w|² |ū⟩⟨ū|` and `TⁿT*ⁿ = |a|^{2n−2} E|u|² |w⟩⟨w|`. For `k ≥ 1` the
/// gap is the scalar `|a|^{2k−2}(λ² E|w|² |a|² − |a|^{2n−2} E|u|² (E|w|²)²)`
/// times `|ū⟩⟨ū|`. For `k = 0` two rank-one terms are compared, which needs
/// `w ∥ ū` and `λ² ≥ |a|^{2n−2}` unless the subtracted term vanishes.
pub fn derived_block_member(s: &BlockStats, k: u32, n: u32, lambda: f64, tol: f64) -> bool {
    let a2 = s.e_uw.norm_sqr();
    let lam2 = lambda * lambda;
    let a_on = s.e_uw.norm() > SUPPORT_TOL * (s.ew * s.eu).sqrt();
    if !(s.in_s && s.in_g) {
        // T vanishes on this block
        return true;
    }
    let apow = |e: i32| chi_pow(a2, a_on, e);
    if k == 0 {
        if n >= 2 && !a_on {
            return true;
        }
        let need = apow(n as i32 - 1);
        s.parallel_defect() <= tol.sqrt() && lam2 >= need * (1.0 - tol)
    } else {
        let lhs = lam2 * s.ew * apow(k as i32);
        let rhs = s.eu * s.ew * s.ew * apow(n as i32 + k as i32 - 2);
        lhs >= rhs - tol * lhs.max(rhs)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BlockInequality {
    /// `lhs ≥ rhs` up to `tol` relative.
    fn geq(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs >= rhs - tol * lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub matrix_norm: f64,
    pub formula_norm: f64,
    pub deviation: f64,
    pub holds: bool,
}

/// `‖T‖ = max_B √(E|w|² E|u|²)`.
pub fn norm_formula_check(op: &WeightedConditionalOperator, tol: f64) -> NormReport {
    let matrix_norm = operator_norm(&op.matrix);
    let formula_norm = op
        .block_stats()
        .iter()
        .map(|s| (s.ew * s.eu).sqrt())
        .fold(0.0, f64::max);
    let deviation = (matrix_norm - formula_norm).abs();
    NormReport {
        matrix_norm,
        formula_norm,
        deviation,
        holds: deviation <= tol * matrix_norm.max(1.0),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma31Report {
    pub m: f64,
    /// Relative deviation for `(T*T)ᵐ`.
    pub star_t_deviation: f64,
    /// Relative deviation for `(TT*)ᵐ`.
    pub t_star_deviation: f64,
    pub holds: bool,
}

fn relative_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let scale = a.frobenius_norm().max(b.frobenius_norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).frobenius_norm() / scale
    }
}

fn positive_power(h: &ComplexMatrix, m: f64) -> Result<ComplexMatrix> {
    if m.fract() == 0.0 && m <= 16.0 {
        return Ok(matpow(h, m as u32)?);
    }
    let eig = hermitian_eigen(h, 1e-8)?;
    // rounding-level eigenvalues would be amplified by fractional powers
    let floor = 1e-12 * eig.spectral_norm();
    Ok(eig.apply_fn(|l| if l <= floor { 0.0 } else { l.powf(m) }))
}

/// Blockwise formulas for `(T*T)ᵐ` and `(TT*)ᵐ` against matrix powers.
/// Integer `m` uses repeated products, other positive `m` the Hermitian
/// functional calculus.
pub fn lemma31_check(op: &WeightedConditionalOperator, m: f64, tol: f64) -> Result<Lemma31Report> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidQuery(format!("m must be positive, got {m}")));
    }
    let stats = op.block_stats();
    let coef_star_t: Vec<f64> = stats
        .iter()
        .map(|s| if s.in_s { s.eu.powf(m - 1.0) * s.ew.powf(m) } else { 0.0 })
        .collect();
    let coef_t_star: Vec<f64> = stats
        .iter()
        .map(|s| if s.in_g { s.ew.powf(m - 1.0) * s.eu.powf(m) } else { 0.0 })
        .collect();
    let (cs, ct) = (op.spread(&coef_star_t), op.spread(&coef_t_star));
    let u = op.u.values();
    let w = op.w.values();
    let a: Vec<C64> = u.iter().zip(&cs).map(|(z, c)| z.conj() * c).collect();
    let rhs_star_t = weighted_expectation_matrix(&op.space, &op.partition, &a, u);
    let wbar: Vec<C64> = w.iter().map(|z| z.conj()).collect();
    let b: Vec<C64> = w.iter().zip(&ct).map(|(z, c)| z * c).collect();
    let rhs_t_star = weighted_expectation_matrix(&op.space, &op.partition, &b, &wbar);

    let t = &op.matrix;
    let lhs_star_t = positive_power(&(&t.adjoint() * t).hermitian_part(), m)?;
    let lhs_t_star = positive_power(&(t * &t.adjoint()).hermitian_part(), m)?;
    let star_t_deviation = relative_deviation(&lhs_star_t, &rhs_star_t);
    let t_star_deviation = relative_deviation(&lhs_t_star, &rhs_t_star);
    Ok(Lemma31Report {
        m,
        star_t_deviation,
        t_star_deviation,
        holds: star_t_deviation <= tol && t_star_deviation <= tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarReport {
    /// `‖U|T| − T‖`
    pub factor_residual: f64,
    /// `‖|T|² − T*T‖`
    pub square_residual: f64,
    pub modulus_min_eigenvalue: f64,
    pub modulus_psd: bool,
    /// `‖U*U − P‖` with `P` the projector onto the range of `|T|`.
    pub partial_isometry_residual: f64,
    pub holds: bool,
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub modulus: ComplexMatrix,
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub isometry: ComplexMatrix,
}

/// `|T| = M_{ū (E|w|²/E|u|²)^{1/2} χ_S} E M_u` and
/// `U = M_{w (χ_{S∩G}/(E|w|² E|u|²))^{1/2}} E M_u`.
pub fn polar_decomposition_check(op: &WeightedConditionalOperator, tol: f64) -> Result<PolarReport> {
    let stats = op.block_stats();
    let c: Vec<f64> = stats
        .iter()
        .map(|s| if s.in_s { (s.ew / s.eu).sqrt() } else { 0.0 })
        .collect();
    let d: Vec<f64> = stats
        .iter()
        .map(|s| if s.in_s && s.in_g { (s.ew * s.eu).sqrt().recip() } else { 0.0 })
        .collect();
    let (c, d) = (op.spread(&c), op.spread(&d));
    let u = op.u.values();
    let a: Vec<C64> = u.iter().zip(&c).map(|(z, c)| z.conj() * c).collect();
    let b: Vec<C64> = op.w.values().iter().zip(&d).map(|(z, d)| z * d).collect();
    let modulus = weighted_expectation_matrix(&op.space, &op.partition, &a, u);
    let isometry = weighted_expectation_matrix(&op.space, &op.partition, &b, u);

    let t = &op.matrix;
    let scale = operator_norm(t).max(1.0);
    let factor_residual = (&(&isometry * &modulus) - t).frobenius_norm();
    let square_residual = (&(&modulus * &modulus) - &(&t.adjoint() * t)).frobenius_norm();
    let psd = is_psd(&modulus, tol)?;
    let range = svd_rank_spaces(&modulus, DEFAULT_RANK_TOL)?.range;
    let partial_isometry_residual = (&(&isometry.adjoint() * &isometry) - &range.projector()).frobenius_norm();
    let holds = factor_residual <= tol * scale
        && square_residual <= tol * scale * scale
        && psd.psd
        && partial_isometry_residual <= tol.sqrt();
    Ok(PolarReport {
        factor_residual,
        square_residual,
        modulus_min_eigenvalue: psd.min_eigenvalue,
        modulus_psd: psd.psd,
        partial_isometry_residual,
        holds,
        modulus,
        isometry,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm33Report {
    pub lambda: f64,
    /// `S(E|u|²) = S(E(u))`, under which the printed equivalence is claimed.
    pub supports_agree: bool,
    /// `λ² E|w|² |E(u)|² ≥ E|u|² |E(w)|²` on each block of `S'`.
    pub blocks: Vec<BlockInequality>,
    pub blockwise_holds: bool,
    pub derived_holds: bool,
    pub matrix_holds: bool,
    /// Blockwise verdict agrees with the matrix verdict.
    pub agree: bool,
}

/// Posinormality of `T` against the printed blockwise inequality.
pub fn thm33_check(op: &WeightedConditionalOperator, lambda: f64, tol: f64) -> Result<Thm33Report> {
    let stats = op.block_stats();
    let lam2 = lambda * lambda;
    let supports_agree = stats.iter().all(|s| s.in_s == s.in_s_prime);
    let blocks: Vec<BlockInequality> = stats
        .iter()
        .map(|s| BlockInequality::geq(lam2 * s.ew * s.e_u.norm_sqr(), s.eu * s.e_w.norm_sqr(), tol))
        .collect();
    let blockwise_holds = blocks.iter().zip(&stats).all(|(b, s)| b.holds || !s.in_s_prime);
    let derived_holds = stats.iter().all(|s| derived_block_member(s, 0, 1, lambda, tol));
    let matrix_holds = posinormal::is_posinormal(&op.matrix, lambda, tol)?.holds;
    Ok(Thm33Report {
        lambda,
        supports_agree,
        blocks,
        blockwise_holds,
        derived_holds,
        matrix_holds,
        agree: blockwise_holds == matrix_holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm34Report {
    pub n: u32,
    pub lambda: f64,
    /// `λ² E|w|² |E(u)|² ≥ |E(uw)|^{2n} (E|u|²/(E|w|²)ⁿ) |E(w)|²` per block.
    pub blocks: Vec<BlockInequality>,
    pub printed_holds: bool,
    pub derived_holds: bool,
    pub matrix_holds: bool,
    /// Matrix membership implies the exact blockwise criterion.
    pub necessity_holds: bool,
    /// Matrix membership implies the printed inequality.
    pub printed_necessity_holds: bool,
}

/// n-power posinormality of `T` against the printed necessary condition.
pub fn thm34_check(op: &WeightedConditionalOperator, n: u32, lambda: f64, tol: f64) -> Result<Thm34Report> {
    if n == 0 {
        return Err(Error::InvalidQuery("n must be at least 1".into()));
    }
    let stats = op.block_stats();
    let lam2 = lambda * lambda;
    let blocks: Vec<BlockInequality> = stats
        .iter()
        .map(|s| {
            let rhs = s.e_uw.norm().powi(2 * n as i32)
                * s.eu
                * chi_pow(s.ew, s.in_g, -(n as i32))
                * s.e_w.norm_sqr();
            BlockInequality::geq(lam2 * s.ew * s.e_u.norm_sqr(), rhs, tol)
        })
        .collect();
    let printed_holds = blocks.iter().all(|b| b.holds);
    let derived_holds = stats.iter().all(|s| derived_block_member(s, 0, n, lambda, tol));
    let matrix_holds = posinormal::is_n_power_posinormal(&op.matrix, n, lambda, tol)?.holds;
    Ok(Thm34Report {
        n,
        lambda,
        blocks,
        printed_holds,
        derived_holds,
        matrix_holds,
        necessity_holds: !matrix_holds || derived_holds,
        printed_necessity_holds: !matrix_holds || printed_holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Thm35Report {
    pub k: u32,
    pub n: u32,
    pub lambda: f64,
    /// `|E(uw)|^{2k+2} ≤ λ² (E|u|²)^{2n−1} (E|w|²)^{2kn−1}` per block.
    pub stated: Vec<BlockInequality>,
    pub stated_holds: bool,
    /// The integrand of the argument at `f = χ_B`:
    /// `λ² E|u|² (E|w|²)^{2k} |E(u)|² ≥ |E(uw)|^{2k+n−1} (E|u|²/(E|w|²)^{n−1})^{1/2} χ_G |E(w)|²`.
    pub proof_form: Vec<BlockInequality>,
    pub proof_form_holds: bool,
    pub derived_holds: bool,
    pub matrix_holds: bool,
    pub disagreements: Vec<String>,
}

/// Stated criterion of the k-quasi n-power case for given blockwise values.
pub fn stated_criterion(e_uw_abs: f64, eu: f64, ew: f64, k: u32, n: u32, lambda: f64, tol: f64) -> BlockInequality {
    let lhs = e_uw_abs.powi(2 * k as i32 + 2);
    let exp_w = 2 * (k * n) as i32 - 1;
    let rhs = lambda * lambda * chi_pow(eu, eu > 0.0, 2 * n as i32 - 1) * chi_pow(ew, ew > 0.0, exp_w);
    let mut b = BlockInequality::geq(rhs, lhs, tol);
    (b.lhs, b.rhs) = (lhs, rhs);
    b
}

pub fn thm35_check(op: &WeightedConditionalOperator, k: u32, n: u32, lambda: f64, tol: f64) -> Result<Thm35Report> {
    let q = ClassQuery::new(k, n, lambda)?;
    let stats = op.block_stats();
    let lam2 = lambda * lambda;
    let stated: Vec<BlockInequality> = stats
        .iter()
        .map(|s| {
            stated_criterion(
                s.e_uw.norm(),
                if s.in_s { s.eu } else { 0.0 },
                if s.in_g { s.ew } else { 0.0 },
                k,
                n,
                lambda,
                tol,
            )
        })
        .collect();
    let proof_form: Vec<BlockInequality> = stats
        .iter()
        .map(|s| {
            let lhs = lam2 * s.eu * s.ew.powi(2 * k as i32) * s.e_u.norm_sqr();
            let ratio = s.eu * chi_pow(s.ew, s.in_g, 1 - n as i32);
            let rhs = s.e_uw.norm().powi(2 * k as i32 + n as i32 - 1)
                * ratio.sqrt()
                * if s.in_g { 1.0 } else { 0.0 }
                * s.e_w.norm_sqr();
            BlockInequality::geq(lhs, rhs, tol)
        })
        .collect();
    let stated_holds = stated.iter().all(|b| b.holds);
    let proof_form_holds = proof_form.iter().all(|b| b.holds);
    let derived_holds = stats.iter().all(|s| derived_block_member(s, k, n, lambda, tol));
    let matrix_holds = posinormal::is_member(&op.matrix, &q, tol)?.holds;
    let mut disagreements = Vec::new();
    for (name, v) in [
        ("stated", stated_holds),
        ("proof-form", proof_form_holds),
        ("derived", derived_holds),
    ] {
        if v != matrix_holds {
            disagreements.push(format!("{name} criterion {v} vs matrix {matrix_holds}"));
        }
    }
    Ok(Thm35Report {
        k,
        n,
        lambda,
        stated,
        stated_holds,
        proof_form,
        proof_form_holds,
        derived_holds,
        matrix_holds,
        disagreements,
    })
}

/// `N` midpoint atoms of mass `1/N` on `[0, 1]` split at `½`, with `w = 2, 1`
/// and `u = x, 1 − x` on the two halves.
pub fn discretize_interval_example(n: usize) -> Result<Setup> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::invalid("N", format!("must be even and at least 2, got {n}")));
    }
    let h = 1.0 / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let labels = xs.iter().map(|x| format!("{x}")).collect();
    let space = FiniteMeasureSpace::with_labels(vec![h; n], labels)?;
    let half = n / 2;
    let partition = BlockPartition::new(vec![(0..half).collect(), (half..n).collect()], n)?;
    let w = MeasurableFunction::from_fn(&space, |i| if i < half { 2.0 } else { 1.0 }.into());
    let u = MeasurableFunction::from_fn(&space, |i| if i < half { xs[i] } else { 1.0 - xs[i] }.into());
    Ok(Setup { space, partition, w, u })
}

/// Random space with `1..=max_atoms` atoms in `1..=max_blocks` blocks and
/// complex weights bounded by 2 in modulus.
pub fn random_setup<R: Rng + ?Sized>(rng: &mut R, max_atoms: usize, max_blocks: usize) -> Setup {
    let atoms = rng.random_range(1..=max_atoms);
    let blocks = rng.random_range(1..=max_blocks.min(atoms));
    let masses: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.1..2.0)).collect();
    let space = FiniteMeasureSpace::new(masses).expect("positive masses");
    // every block gets one atom, the rest land anywhere
    let mut order: Vec<usize> = (0..atoms).collect();
    for i in (1..atoms).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for (slot, &atom) in order.iter().enumerate() {
        let b = if slot < blocks { slot } else { rng.random_range(0..blocks) };
        parts[b].push(atom);
    }
    let partition = BlockPartition::new(parts, atoms).expect("valid partition");
    let mut weight = || MeasurableFunction {
        values: (0..atoms)
            .map(|_| {
                let z = random::complex_gaussian(rng);
                if z.norm() > 2.0 { z * (2.0 / z.norm()) } else { z }
            })
            .collect(),
    };
    let w = weight();
    let u = weight();
    Setup { space, partition, w, u }
}
