//! Critical-set geometry: common components of the unperturbed field, the
//! branch decomposition of `C = V(F)`, singular (self-intersection) points,
//! transversality, Whitney and relaxed stratifications, and the odd-power
//! desingularisation rescaling.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::numeric;
use crate::poly::sturm::{isolate_roots, RootLocation};
use crate::poly::{
    rat, rat_to_f64, MultiPoly, PolyError, PolyVectorField, Rational, SquarefreeFactor,
};

/// Identifier of a branch inside one `CriticalSet` (index into `branches`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchId(pub usize);

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "branch#{}", self.0)
    }
}

/// A point of the plane, exact when available.
#[derive(Debug, Clone, PartialEq)]
pub enum Coord2 {
    Exact([Rational; 2]),
    Approx([f64; 2]),
}

impl Coord2 {
    pub fn origin() -> Self {
        Coord2::Exact([Rational::zero(), Rational::zero()])
    }

    pub fn to_f64(&self) -> [f64; 2] {
        match self {
            Coord2::Exact([x, y]) => [rat_to_f64(x), rat_to_f64(y)],
            Coord2::Approx(p) => *p,
        }
    }

    pub fn as_exact(&self) -> Option<&[Rational; 2]> {
        match self {
            Coord2::Exact(p) => Some(p),
            Coord2::Approx(_) => None,
        }
    }
}

/// Rectangular analysis window with rational corners.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBox {
    pub x_min: Rational,
    pub x_max: Rational,
    pub y_min: Rational,
    pub y_max: Rational,
}

impl Default for AnalysisBox {
    /// The default window `[-1, 1]^2`; every worked example has its
    /// singularity at the origin.
    fn default() -> Self {
        AnalysisBox {
            x_min: rat(-1, 1),
            x_max: rat(1, 1),
            y_min: rat(-1, 1),
            y_max: rat(1, 1),
        }
    }
}

impl AnalysisBox {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Option<Self> {
        if !(x_min < x_max && y_min < y_max) {
            return None;
        }
        let r = |v: f64| Rational::from_float(v);
        Some(AnalysisBox {
            x_min: r(x_min)?,
            x_max: r(x_max)?,
            y_min: r(y_min)?,
            y_max: r(y_max)?,
        })
    }

    pub fn contains_exact(&self, p: &[Rational; 2]) -> bool {
        self.x_min <= p[0] && p[0] <= self.x_max && self.y_min <= p[1] && p[1] <= self.y_max
    }

    pub fn contains_f64(&self, p: [f64; 2]) -> bool {
        let eps = 1e-12;
        rat_to_f64(&self.x_min) - eps <= p[0]
            && p[0] <= rat_to_f64(&self.x_max) + eps
            && rat_to_f64(&self.y_min) - eps <= p[1]
            && p[1] <= rat_to_f64(&self.y_max) + eps
    }

    pub fn half_extent(&self) -> f64 {
        let w = rat_to_f64(&self.x_max) - rat_to_f64(&self.x_min);
        let h = rat_to_f64(&self.y_max) - rat_to_f64(&self.y_min);
        0.25 * w.min(h)
    }
}

/// One irreducible branch `V(F_i)` of the critical variety.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: BranchId,
    /// Monic defining polynomial in `(x, y)`.
    pub defining_poly: MultiPoly,
    /// Exact gradient `(dF/dx, dF/dy)`.
    pub gradient: [MultiPoly; 2],
    /// Certified irreducible over the rationals (false for parts kept
    /// unsplit by the bounded factorisation).
    pub certified_irreducible: bool,
}

impl Branch {
    fn new(id: BranchId, poly: MultiPoly, certified: bool) -> Result<Self, PolyError> {
        let gx = poly.differentiate("x")?;
        let gy = poly.differentiate("y")?;
        Ok(Branch {
            id,
            defining_poly: poly,
            gradient: [gx, gy],
            certified_irreducible: certified,
        })
    }

    pub fn gradient_f64(&self, p: [f64; 2]) -> [f64; 2] {
        [self.gradient[0].eval_f64(&p), self.gradient[1].eval_f64(&p)]
    }
}

/// Errors of critical-set construction and stratification.
#[derive(Debug, Clone, PartialEq)]
pub enum CriticalSetError {
    /// `X0` is identically zero.
    ZeroField,
    /// A shared factor occurs with an even multiplicity; the odd-power
    /// rescaling does not apply.
    EvenMultiplicity { factor: String, multiplicity: u32 },
    /// Two branches share a component (non-isolated intersection).
    SharedComponent { a: BranchId, b: BranchId },
    /// The point passed to the stratifier is not pairwise transversal.
    NotTransversal,
    /// Maximal-rank (Whitney regularity) sampling failed on a half-branch.
    RankDrop { branch: BranchId, side: Side },
    /// Underlying polynomial-algebra failure.
    Poly(PolyError),
}

impl From<PolyError> for CriticalSetError {
    fn from(e: PolyError) -> Self {
        CriticalSetError::Poly(e)
    }
}

impl fmt::Display for CriticalSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalSetError::ZeroField => write!(f, "X0 is identically zero"),
            CriticalSetError::EvenMultiplicity { factor, multiplicity } => write!(
                f,
                "shared factor ({factor}) has even multiplicity {multiplicity}; \
                 the odd-power rescaling does not apply"
            ),
            CriticalSetError::SharedComponent { a, b } => {
                write!(f, "{a} and {b} share a component; intersections are not isolated")
            }
            CriticalSetError::NotTransversal => {
                write!(f, "singular point is not pairwise transversal")
            }
            CriticalSetError::RankDrop { branch, side } => {
                write!(f, "Jacobian rank drops along {branch} ({side:?} side)")
            }
            CriticalSetError::Poly(e) => write!(f, "{e}"),
        }
    }
}

/// The critical variety `C = V(F)` together with the fast cofactor frame.
///
/// Reconstruction invariant: `F * rescaling * cofactor = X0` componentwise.
/// The rescaling collects even powers `F_i^(2k)` stripped by the odd-power
/// desingularisation; it is one whenever every shared multiplicity is one.
#[derive(Debug, Clone)]
pub struct CriticalSet {
    pub branches: Vec<Branch>,
    /// `F`: product of the branch polynomials scaled so the reconstruction
    /// invariant holds with the stored cofactor.
    pub common_poly: MultiPoly,
    /// Fast-frame generator `(A-hat, B-hat)`.
    pub fast_cofactor: [MultiPoly; 2],
    /// Even-power factor removed by desingularisation (one if none).
    pub rescaling: MultiPoly,
    /// True when one component of `X0` is identically zero.
    pub standard_form: bool,
    /// Singular-perturbation verdict: `dim V(F) = 1`.
    pub singular: bool,
    /// True when some squarefree part resisted the degree-two factor search
    /// (branch list may be coarser than the true irreducible decomposition).
    pub has_unsplit_parts: bool,
}

impl CriticalSet {
    pub fn branch(&self, id: BranchId) -> &Branch {
        &self.branches[id.0]
    }

    /// The desingularised field `F * (A-hat, B-hat)`; equals `X0` when no
    /// rescaling was applied.
    pub fn desingularized_field(&self) -> PolyVectorField {
        let a = self.common_poly.mul(&self.fast_cofactor[0]).expect("same vars");
        let b = self.common_poly.mul(&self.fast_cofactor[1]).expect("same vars");
        PolyVectorField::planar(a, b).expect("same vars")
    }

    /// Transverse eigenvalue of `DX0` on the critical set: for a point of
    /// `C`, `DX0 = (A-hat, B-hat)^T grad F`, whose nonzero eigenvalue is the
    /// trace `A-hat dF/dx + B-hat dF/dy`.
    pub fn transverse_eigenvalue_exact(&self, p: &[Rational; 2]) -> Result<Rational, PolyError> {
        let fx = self.common_poly.differentiate("x")?;
        let fy = self.common_poly.differentiate("y")?;
        let at = [("x", p[0].clone()), ("y", p[1].clone())];
        Ok(self.fast_cofactor[0].eval_rational(&at)? * fx.eval_rational(&at)?
            + self.fast_cofactor[1].eval_rational(&at)? * fy.eval_rational(&at)?)
    }

    pub fn transverse_eigenvalue_f64(&self, p: [f64; 2]) -> f64 {
        let fx = self.common_poly.differentiate("x").expect("x");
        let fy = self.common_poly.differentiate("y").expect("y");
        self.fast_cofactor[0].eval_f64(&p) * fx.eval_f64(&p)
            + self.fast_cofactor[1].eval_f64(&p) * fy.eval_f64(&p)
    }
}

/// Build the critical set of a planar field, detecting the standard form,
/// shared components, and the singular-perturbation verdict.
pub fn build_critical_set(x0: &PolyVectorField) -> Result<CriticalSet, CriticalSetError> {
    assert_eq!(x0.dim(), 2, "planar field expected");
    let a = x0.component(0);
    let b = x0.component(1);
    if a.is_zero() && b.is_zero() {
        return Err(CriticalSetError::ZeroField);
    }
    let vars = a.vars().clone();

    let (shared, standard_form) = if b.is_zero() {
        (a.clone(), true)
    } else if a.is_zero() {
        (b.clone(), true)
    } else {
        (a.gcd(b)?, false)
    };

    if shared.is_constant() {
        // regular perturbation: critical set is at most a finite point set
        return Ok(CriticalSet {
            branches: Vec::new(),
            common_poly: MultiPoly::one(&vars),
            fast_cofactor: [a.clone(), b.clone()],
            rescaling: MultiPoly::one(&vars),
            standard_form,
            singular: false,
            has_unsplit_parts: false,
        });
    }

    let decomp = shared.squarefree_factor()?;
    for f in &decomp.factors {
        if f.multiplicity % 2 == 0 {
            return Err(CriticalSetError::EvenMultiplicity {
                factor: f.factor.to_string(),
                multiplicity: f.multiplicity,
            });
        }
    }
    // odd-power rescaling: strip F_i^(mult-1), an even power
    let mut rescaling = MultiPoly::one(&vars);
    for f in &decomp.factors {
        if f.multiplicity > 1 {
            rescaling = rescaling.mul(&f.factor.pow(f.multiplicity - 1))?;
        }
    }
    let common_poly = shared
        .exact_div(&rescaling)
        .expect("rescaling divides the shared factor");

    let mut branches = Vec::new();
    let mut has_unsplit = false;
    for f in &decomp.factors {
        has_unsplit |= !f.irreducible;
        branches.push(Branch::new(
            BranchId(branches.len()),
            f.factor.clone(),
            f.irreducible,
        )?);
    }

    let full = common_poly.mul(&rescaling)?;
    let cof_a = if a.is_zero() {
        MultiPoly::zero(&vars)
    } else {
        a.exact_div(&full).expect("common factor divides A")
    };
    let cof_b = if b.is_zero() {
        MultiPoly::zero(&vars)
    } else {
        b.exact_div(&full).expect("common factor divides B")
    };

    Ok(CriticalSet {
        branches,
        common_poly,
        fast_cofactor: [cof_a, cof_b],
        rescaling,
        standard_form,
        singular: true,
        has_unsplit_parts: has_unsplit,
    })
}

/// Strip even powers from a squarefree decomposition: `F -> F / prod
/// F_i^(mult-1)` for odd multiplicities; errors on any even one.
pub fn odd_power_rescale(
    f: &MultiPoly,
    factors: &[SquarefreeFactor],
) -> Result<MultiPoly, CriticalSetError> {
    let mut out = f.clone();
    for sf in factors {
        if sf.multiplicity % 2 == 0 {
            return Err(CriticalSetError::EvenMultiplicity {
                factor: sf.factor.to_string(),
                multiplicity: sf.multiplicity,
            });
        }
        if sf.multiplicity > 1 {
            let strip = sf.factor.pow(sf.multiplicity - 1);
            out = out
                .exact_div(&strip)
                .ok_or(CriticalSetError::Poly(PolyError::InexactDivision))?;
        }
    }
    Ok(out)
}

/// A self-intersection point of the critical variety.
#[derive(Debug, Clone)]
pub struct SingularPoint {
    pub location: Coord2,
    pub incident_branches: Vec<BranchId>,
    pub pairwise_transversal: bool,
    /// Branch pairs whose gradients are linearly dependent at the point.
    pub tangential_pairs: Vec<(BranchId, BranchId)>,
}

/// All pairwise branch intersections inside the box. Intersections are found
/// by eliminating `y` with a resultant, isolating the real roots of the
/// eliminant, back-substituting exactly, and confirming rational candidates
/// by exact evaluation (floating candidates are Newton-polished).
pub fn find_singular_points(
    cs: &CriticalSet,
    bx: &AnalysisBox,
) -> Result<Vec<SingularPoint>, CriticalSetError> {
    let mut found: Vec<(Coord2, Vec<BranchId>)> = Vec::new();
    let width = Rational::new(1.into(), num_bigint::BigInt::from(1u128 << 44));
    for i in 0..cs.branches.len() {
        for j in i + 1..cs.branches.len() {
            let fi = &cs.branches[i].defining_poly;
            let fj = &cs.branches[j].defining_poly;
            if !fi.gcd(fj)?.is_constant() {
                return Err(CriticalSetError::SharedComponent { a: BranchId(i), b: BranchId(j) });
            }
            let elim = fi.resultant(fj, "y")?;
            if elim.is_zero() {
                return Err(CriticalSetError::SharedComponent { a: BranchId(i), b: BranchId(j) });
            }
            if elim.is_constant() {
                continue; // no intersection anywhere
            }
            let coeffs = univ_coeffs_in(&elim, "x")?;
            for root in isolate_roots(&coeffs, &bx.x_min, &bx.x_max, &width) {
                match root {
                    RootLocation::Exact(xr) => {
                        for yr in common_y_roots_exact(fi, fj, &xr, bx, &width)? {
                            match yr {
                                RootLocation::Exact(yv) => merge_point(
                                    &mut found,
                                    Coord2::Exact([xr.clone(), yv]),
                                    &[BranchId(i), BranchId(j)],
                                ),
                                RootLocation::Interval { approx, .. } => merge_point(
                                    &mut found,
                                    Coord2::Approx([rat_to_f64(&xr), approx]),
                                    &[BranchId(i), BranchId(j)],
                                ),
                            }
                        }
                    }
                    RootLocation::Interval { approx, .. } => {
                        for p in float_intersections(fi, fj, approx, bx) {
                            merge_point(&mut found, Coord2::Approx(p), &[BranchId(i), BranchId(j)]);
                        }
                    }
                }
            }
        }
    }

    let mut out = Vec::new();
    for (location, mut incident) in found {
        incident.sort();
        incident.dedup();
        // extend incidence to branches not in the discovering pairs
        for br in &cs.branches {
            if incident.contains(&br.id) {
                continue;
            }
            let on = match &location {
                Coord2::Exact(p) => br
                    .defining_poly
                    .eval_rational(&[("x", p[0].clone()), ("y", p[1].clone())])?
                    .is_zero(),
                Coord2::Approx(p) => {
                    numeric::fabs(br.defining_poly.eval_f64(&p[..])) < 1e-12
                }
            };
            if on {
                incident.push(br.id);
            }
        }
        incident.sort();
        let mut tangential = Vec::new();
        for (ai, a) in incident.iter().enumerate() {
            for b in incident.iter().skip(ai + 1) {
                if !pair_transversal(cs, &location, *a, *b)? {
                    tangential.push((*a, *b));
                }
            }
        }
        out.push(SingularPoint {
            location,
            pairwise_transversal: tangential.is_empty(),
            incident_branches: incident,
            tangential_pairs: tangential,
        });
    }
    out.sort_by(|a, b| {
        let pa = a.location.to_f64();
        let pb = b.location.to_f64();
        pa.partial_cmp(&pb).unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(out)
}

fn univ_coeffs_in(p: &MultiPoly, var: &str) -> Result<Vec<Rational>, PolyError> {
    let idx = p
        .vars()
        .index_of(var)
        .ok_or_else(|| PolyError::UnknownVariable(var.into()))?;
    let d = p.degree_in(idx);
    let mut out = alloc::vec![Rational::zero(); d as usize + 1];
    for (m, c) in p.terms() {
        // the eliminant must be univariate in `var`
        debug_assert!(m.0.iter().enumerate().all(|(k, &e)| k == idx || e == 0));
        out[m.0[idx] as usize] = c.clone();
    }
    Ok(out)
}

/// Substitute an exact x-value and intersect the y-root sets of the two
/// branch polynomials via a univariate gcd.
fn common_y_roots_exact(
    fi: &MultiPoly,
    fj: &MultiPoly,
    x: &Rational,
    bx: &AnalysisBox,
    width: &Rational,
) -> Result<Vec<RootLocation>, PolyError> {
    let gi = specialize(fi, "x", x)?;
    let gj = specialize(fj, "x", x)?;
    let ci = univ_coeffs_in(&gi, "y")?;
    let cj = univ_coeffs_in(&gj, "y")?;
    let g = univ_gcd(&ci, &cj);
    if g.len() <= 1 {
        return Ok(Vec::new());
    }
    Ok(isolate_roots(&g, &bx.y_min, &bx.y_max, width))
}

fn specialize(p: &MultiPoly, var: &str, value: &Rational) -> Result<MultiPoly, PolyError> {
    let c = MultiPoly::constant(p.vars(), value.clone());
    p.substitute(p.vars(), &[(var, c)])
}

fn univ_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
        while v.last().map(|x| x.is_zero()).unwrap_or(false) {
            v.pop();
        }
        v
    }
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        // remainder of a by b
        let db = b.len() - 1;
        let lb = b.last().unwrap().clone();
        let mut r = a.clone();
        while r.len() > db {
            let dr = r.len() - 1;
            let q = r.last().unwrap() / &lb;
            for k in 0..=db {
                let idx = dr - db + k;
                let s = &q * &b[k];
                r[idx] -= s;
            }
            r = trim(r);
            if r.is_empty() {
                break;
            }
        }
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        let lc = a.last().unwrap().clone();
        a.iter().map(|x| x / &lc).collect()
    }
}

/// Floating fallback: 2-D Newton on `(F_i, F_j)` from seeds along `x ~ xr`.
fn float_intersections(
    fi: &MultiPoly,
    fj: &MultiPoly,
    xr: f64,
    bx: &AnalysisBox,
) -> Vec<[f64; 2]> {
    let gix = fi.differentiate("x").expect("x");
    let giy = fi.differentiate("y").expect("y");
    let gjx = fj.differentiate("x").expect("x");
    let gjy = fj.differentiate("y").expect("y");
    let y_lo = rat_to_f64(&bx.y_min);
    let y_hi = rat_to_f64(&bx.y_max);
    let mut out: Vec<[f64; 2]> = Vec::new();
    let seeds = 33;
    for s in 0..=seeds {
        let mut p = [xr, y_lo + (y_hi - y_lo) * s as f64 / seeds as f64];
        let mut converged = false;
        for _ in 0..80 {
            let f = [fi.eval_f64(&p), fj.eval_f64(&p)];
            if numeric::hypot(f[0], f[1]) < 1e-13 {
                converged = true;
                break;
            }
            let j = [
                [gix.eval_f64(&p), giy.eval_f64(&p)],
                [gjx.eval_f64(&p), gjy.eval_f64(&p)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if numeric::fabs(det) < 1e-14 {
                break;
            }
            p[0] -= (f[0] * j[1][1] - f[1] * j[0][1]) / det;
            p[1] -= (f[1] * j[0][0] - f[0] * j[1][0]) / det;
        }
        if converged
            && bx.contains_f64(p)
            && numeric::fabs(p[0] - xr) < 1e-6
            && !out.iter().any(|q| numeric::hypot(q[0] - p[0], q[1] - p[1]) < 1e-9)
        {
            out.push(p);
        }
    }
    out
}

fn merge_point(found: &mut Vec<(Coord2, Vec<BranchId>)>, loc: Coord2, ids: &[BranchId]) {
    for (existing, incident) in found.iter_mut() {
        let same = match (existing, &loc) {
            (Coord2::Exact(a), Coord2::Exact(b)) => a == b,
            (ea, eb) => {
                let (a, b) = (ea.to_f64(), eb.to_f64());
                numeric::hypot(a[0] - b[0], a[1] - b[1]) < 1e-9
            }
        };
        if same {
            incident.extend_from_slice(ids);
            return;
        }
    }
    found.push((loc, ids.to_vec()));
}

/// Exact (or floating, for irrational points) transversality of one branch
/// pair: nonvanishing of `det(grad F_a, grad F_b)` at the point.
fn pair_transversal(
    cs: &CriticalSet,
    loc: &Coord2,
    a: BranchId,
    b: BranchId,
) -> Result<bool, CriticalSetError> {
    let ga = &cs.branch(a).gradient;
    let gb = &cs.branch(b).gradient;
    match loc {
        Coord2::Exact(p) => {
            let at = [("x", p[0].clone()), ("y", p[1].clone())];
            let det = ga[0].eval_rational(&at)? * gb[1].eval_rational(&at)?
                - ga[1].eval_rational(&at)? * gb[0].eval_rational(&at)?;
            Ok(!det.is_zero())
        }
        Coord2::Approx(p) => {
            let det = ga[0].eval_f64(&p[..]) * gb[1].eval_f64(&p[..])
                - ga[1].eval_f64(&p[..]) * gb[0].eval_f64(&p[..]);
            Ok(numeric::fabs(det) > 1e-10)
        }
    }
}

// ---------------------------------------------------------------------------
// Branch parameterisation
// ---------------------------------------------------------------------------

/// Side of a half-branch relative to the singular point, oriented by the
/// rotated-gradient tangent `(-dF/dy, dF/dx)(p_s)`: the positive side is the
/// one the tangent vector points into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Neg,
    Pos,
}

impl Side {
    pub fn signum(self) -> f64 {
        match self {
            Side::Neg => -1.0,
            Side::Pos => 1.0,
        }
    }
}

/// Graph coordinate used to parameterise a branch near a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphAxis {
    X,
    Y,
}

/// Local graph parameterisation of a branch around a base point: the branch
/// is solved for the non-dominant coordinate as a function of the dominant
/// one (the one with the larger tangent component).
#[derive(Debug, Clone)]
pub struct BranchChart {
    pub branch: BranchId,
    pub base: Coord2,
    pub axis: GraphAxis,
    /// Sign translating "positive side" into the motion of the graph axis.
    pub axis_direction: f64,
    /// Tangent at the base point, exact.
    pub tangent: [Rational; 2],
}

impl BranchChart {
    /// Build the chart at an exact base point on the branch.
    pub fn at_exact(
        cs: &CriticalSet,
        branch: BranchId,
        base: &[Rational; 2],
    ) -> Result<Self, CriticalSetError> {
        let br = cs.branch(branch);
        let at = [("x", base[0].clone()), ("y", base[1].clone())];
        let gx = br.gradient[0].eval_rational(&at)?;
        let gy = br.gradient[1].eval_rational(&at)?;
        if gx.is_zero() && gy.is_zero() {
            return Err(CriticalSetError::RankDrop { branch, side: Side::Pos });
        }
        let tangent = [-gy, gx];
        let tx = rat_to_f64(&tangent[0]);
        let ty = rat_to_f64(&tangent[1]);
        let axis = if numeric::fabs(tx) >= numeric::fabs(ty) {
            GraphAxis::X
        } else {
            GraphAxis::Y
        };
        let axis_component = match axis {
            GraphAxis::X => tx,
            GraphAxis::Y => ty,
        };
        Ok(BranchChart {
            branch,
            base: Coord2::Exact(base.clone()),
            axis,
            axis_direction: if axis_component >= 0.0 { 1.0 } else { -1.0 },
            tangent,
        })
    }

    /// Point on the branch at graph offset `side * t` (t > 0, rational) from
    /// the base, solved exactly via root isolation in the other coordinate.
    /// Exact when the branch admits a rational point there.
    pub fn sample(
        &self,
        cs: &CriticalSet,
        side: Side,
        t: &Rational,
    ) -> Result<Coord2, CriticalSetError> {
        let base = self.base.as_exact().expect("exact base");
        let br = cs.branch(self.branch);
        let dir = rat(if side.signum() * self.axis_direction >= 0.0 { 1 } else { -1 }, 1);
        let (fixed_var, solve_var, fixed_val, guess) = match self.axis {
            GraphAxis::X => {
                let x = &base[0] + &dir * t;
                // first-order prediction for y along the tangent
                let slope = if self.tangent[0].is_zero() {
                    Rational::zero()
                } else {
                    &self.tangent[1] / &self.tangent[0]
                };
                let y_guess = &base[1] + (&x - &base[0]) * slope;
                ("x", "y", x, y_guess)
            }
            GraphAxis::Y => {
                let y = &base[1] + &dir * t;
                let slope = if self.tangent[1].is_zero() {
                    Rational::zero()
                } else {
                    &self.tangent[0] / &self.tangent[1]
                };
                let x_guess = &base[0] + (&y - &base[1]) * slope;
                ("y", "x", y, x_guess)
            }
        };
        let restricted = specialize(&br.defining_poly, fixed_var, &fixed_val)?;
        let coeffs = univ_coeffs_in(&restricted, solve_var)?;
        let window = rat(4, 1);
        let lo = &guess - &window;
        let hi = &guess + &window;
        let width = Rational::new(1.into(), num_bigint::BigInt::from(1u128 << 44));
        let roots = isolate_roots(&coeffs, &lo, &hi, &width);
        let guess_f = rat_to_f64(&guess);
        let best = roots.into_iter().min_by(|a, b| {
            numeric::fabs(a.to_f64() - guess_f)
                .partial_cmp(&numeric::fabs(b.to_f64() - guess_f))
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let Some(best) = best else {
            return Err(CriticalSetError::RankDrop { branch: self.branch, side });
        };
        let point = match (self.axis, best) {
            (GraphAxis::X, RootLocation::Exact(y)) => Coord2::Exact([fixed_val, y]),
            (GraphAxis::X, RootLocation::Interval { approx, .. }) => {
                Coord2::Approx([rat_to_f64(&fixed_val), approx])
            }
            (GraphAxis::Y, RootLocation::Exact(x)) => Coord2::Exact([x, fixed_val]),
            (GraphAxis::Y, RootLocation::Interval { approx, .. }) => {
                Coord2::Approx([approx, rat_to_f64(&fixed_val)])
            }
        };
        Ok(point)
    }
}

// ---------------------------------------------------------------------------
// Stratifications
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StratKind {
    Whitney,
    Relaxed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StratumCarrier {
    /// The singular point.
    Point,
    /// One half of a branch relative to the singular point.
    HalfBranch { branch: BranchId, side: Side },
    /// A full smooth branch (both halves joined with the singular point, or
    /// a branch without any singular point on it).
    FullBranch { branch: BranchId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub dimension: u8,
    pub carrier: StratumCarrier,
    /// Indices (into the stratification) of 0-strata in this stratum's
    /// closure.
    pub closure_links: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Stratification {
    pub kind: StratKind,
    pub strata: Vec<Stratum>,
    /// The singular point the stratification is built around, if any.
    pub base_point: Option<Coord2>,
}

impl Stratification {
    /// The identity stratification of a smooth branch with no singular point.
    pub fn trivial(branch: BranchId) -> Self {
        Stratification {
            kind: StratKind::Relaxed,
            strata: alloc::vec![Stratum {
                dimension: 1,
                carrier: StratumCarrier::FullBranch { branch },
                closure_links: Vec::new(),
            }],
            base_point: None,
        }
    }

    pub fn one_dimensional(&self) -> impl Iterator<Item = &Stratum> {
        self.strata.iter().filter(|s| s.dimension == 1)
    }

    /// The branch carrying the smooth (joined) stratum of a relaxed
    /// stratification.
    pub fn smooth_branch(&self) -> Option<BranchId> {
        self.strata.iter().find_map(|s| match s.carrier {
            StratumCarrier::FullBranch { branch } => Some(branch),
            _ => None,
        })
    }
}

/// Number of rank-check samples per half-branch.
const RANK_SAMPLES: u32 = 16;

/// Whitney stratification around one pairwise-transversal singular point:
/// `2N` half-branches plus the point stratum. Maximal rank of the Jacobian of
/// the (desingularised) field is verified by sampling along each half-branch.
pub fn whitney_stratify(
    cs: &CriticalSet,
    p: &SingularPoint,
    bx: &AnalysisBox,
) -> Result<Stratification, CriticalSetError> {
    if !p.pairwise_transversal {
        return Err(CriticalSetError::NotTransversal);
    }
    let field = cs.desingularized_field();
    let jac = field.jacobian()?;
    let mut strata = Vec::new();
    let point_idx = p.incident_branches.len() * 2; // appended last
    for &bid in &p.incident_branches {
        for side in [Side::Neg, Side::Pos] {
            verify_rank_along(cs, &jac, bid, p, side, bx)?;
            strata.push(Stratum {
                dimension: 1,
                carrier: StratumCarrier::HalfBranch { branch: bid, side },
                closure_links: alloc::vec![point_idx],
            });
        }
    }
    strata.push(Stratum {
        dimension: 0,
        carrier: StratumCarrier::Point,
        closure_links: Vec::new(),
    });
    Ok(Stratification {
        kind: StratKind::Whitney,
        strata,
        base_point: Some(p.location.clone()),
    })
}

fn verify_rank_along(
    cs: &CriticalSet,
    jac: &[Vec<MultiPoly>],
    branch: BranchId,
    p: &SingularPoint,
    side: Side,
    bx: &AnalysisBox,
) -> Result<(), CriticalSetError> {
    let Some(base) = p.location.as_exact() else {
        // floating singular point: sample in floats
        return verify_rank_float(cs, jac, branch, p, side, bx);
    };
    let chart = BranchChart::at_exact(cs, branch, base)?;
    let t_max = Rational::from_float(bx.half_extent()).unwrap_or_else(|| rat(1, 4));
    for k in 1..=RANK_SAMPLES {
        let t = &t_max * rat(k as i64, RANK_SAMPLES as i64);
        let sample = chart.sample(cs, side, &t)?;
        let nonzero = match &sample {
            Coord2::Exact(q) => {
                let at = [("x", q[0].clone()), ("y", q[1].clone())];
                let mut any = false;
                for row in jac {
                    for entry in row {
                        if !entry.eval_rational(&at)?.is_zero() {
                            any = true;
                        }
                    }
                }
                any
            }
            Coord2::Approx(q) => jac
                .iter()
                .any(|row| row.iter().any(|e| numeric::fabs(e.eval_f64(&q[..])) > 1e-9)),
        };
        if !nonzero {
            return Err(CriticalSetError::RankDrop { branch, side });
        }
    }
    Ok(())
}

fn verify_rank_float(
    cs: &CriticalSet,
    jac: &[Vec<MultiPoly>],
    branch: BranchId,
    p: &SingularPoint,
    side: Side,
    bx: &AnalysisBox,
) -> Result<(), CriticalSetError> {
    let base = p.location.to_f64();
    let br = cs.branch(branch);
    let g = br.gradient_f64(base);
    let t = [-g[1], g[0]];
    let n = numeric::hypot(t[0], t[1]);
    if n == 0.0 {
        return Err(CriticalSetError::RankDrop { branch, side });
    }
    let t_max = bx.half_extent();
    for k in 1..=RANK_SAMPLES {
        let s = side.signum() * t_max * k as f64 / RANK_SAMPLES as f64;
        // first-order point on the tangent, then Newton back to the branch
        let mut q = [base[0] + s * t[0] / n, base[1] + s * t[1] / n];
        for _ in 0..40 {
            let f = br.defining_poly.eval_f64(&q);
            let gg = br.gradient_f64(q);
            let n2 = gg[0] * gg[0] + gg[1] * gg[1];
            if n2 < 1e-18 {
                break;
            }
            q[0] -= f * gg[0] / n2;
            q[1] -= f * gg[1] / n2;
            if numeric::fabs(f) < 1e-13 {
                break;
            }
        }
        let ok = jac
            .iter()
            .any(|row| row.iter().any(|e| numeric::fabs(e.eval_f64(&q)) > 1e-9));
        if !ok {
            return Err(CriticalSetError::RankDrop { branch, side });
        }
    }
    Ok(())
}

/// All relaxed stratifications of a Whitney stratification around one point:
/// one per incident branch, joining that branch's two half-branches with the
/// point into a single smooth stratum. Only same-branch unions are smooth.
pub fn relaxed_stratifications(ws: &Stratification) -> Vec<Stratification> {
    assert_eq!(ws.kind, StratKind::Whitney);
    let halves: Vec<(BranchId, usize)> = ws
        .strata
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s.carrier {
            StratumCarrier::HalfBranch { branch, .. } => Some((branch, i)),
            _ => None,
        })
        .collect();
    let mut branch_ids: Vec<BranchId> = halves.iter().map(|(b, _)| *b).collect();
    branch_ids.sort();
    branch_ids.dedup();
    if branch_ids.is_empty() {
        // no singular point: the stratification is already its own relaxation
        let mut out = ws.clone();
        out.kind = StratKind::Relaxed;
        return alloc::vec![out];
    }
    let mut out = Vec::new();
    for &joined in &branch_ids {
        let mut strata = alloc::vec![Stratum {
            dimension: 1,
            carrier: StratumCarrier::FullBranch { branch: joined },
            closure_links: Vec::new(),
        }];
        for s in &ws.strata {
            if let StratumCarrier::HalfBranch { branch, side } = s.carrier {
                if branch != joined {
                    strata.push(Stratum {
                        dimension: 1,
                        carrier: StratumCarrier::HalfBranch { branch, side },
                        closure_links: Vec::new(), // re-linked below
                    });
                }
            }
        }
        // no free-standing 0-stratum remains: the point is interior to the
        // joined stratum, so the half-branches have it in their closure but
        // it is not a separate member of the relaxed partition
        out.push(Stratification {
            kind: StratKind::Relaxed,
            strata,
            base_point: ws.base_point.clone(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Vars};

    fn field(a: &str, b: &str) -> PolyVectorField {
        let vars = Vars::xy();
        PolyVectorField::planar(
            parse_poly(a, &vars).unwrap(),
            parse_poly(b, &vars).unwrap(),
        )
        .unwrap()
    }

    fn transcritical() -> CriticalSet {
        build_critical_set(&field("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0")).unwrap()
    }

    fn pitchfork() -> CriticalSet {
        build_critical_set(&field("(x + y/2)*(x - y/2)*(y - x^2)", "0")).unwrap()
    }

    #[test]
    fn transcritical_critical_set() {
        let cs = transcritical();
        assert_eq!(cs.branches.len(), 4);
        assert!(cs.standard_form);
        assert!(cs.singular);
        assert_eq!(cs.fast_cofactor[0], MultiPoly::one(&Vars::xy()));
        assert!(cs.fast_cofactor[1].is_zero());
        // reconstruction: F * rescaling * cofactor = X0
        let back = cs
            .common_poly
            .mul(&cs.rescaling)
            .unwrap()
            .mul(&cs.fast_cofactor[0])
            .unwrap();
        assert_eq!(back, parse_poly("(y-x)*(y+x)*(y-x/2)*(y+x/2)", &Vars::xy()).unwrap());
    }

    #[test]
    fn pitchfork_critical_set() {
        let cs = pitchfork();
        assert_eq!(cs.branches.len(), 3);
        assert_eq!(cs.fast_cofactor[0], MultiPoly::one(&Vars::xy()));
        let mut degs: Vec<u32> = cs
            .branches
            .iter()
            .map(|b| b.defining_poly.total_degree())
            .collect();
        degs.sort();
        assert_eq!(degs, alloc::vec![1, 1, 2]);
    }

    #[test]
    fn coprime_components_not_singular() {
        let cs = build_critical_set(&field("x", "y")).unwrap();
        assert!(!cs.singular);
        assert!(cs.branches.is_empty());
    }

    #[test]
    fn zero_field_rejected() {
        assert_eq!(
            build_critical_set(&field("0", "0")).unwrap_err(),
            CriticalSetError::ZeroField
        );
    }

    #[test]
    fn even_multiplicity_rejected() {
        let err = build_critical_set(&field("(x-y)^2*(x+y)", "0")).unwrap_err();
        match err {
            CriticalSetError::EvenMultiplicity { multiplicity, .. } => {
                assert_eq!(multiplicity, 2)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn odd_multiplicity_rescaled() {
        let cs = build_critical_set(&field("(x-y)^3*(x+y)", "0")).unwrap();
        assert_eq!(cs.branches.len(), 2);
        let expect = parse_poly("(x-y)^2", &Vars::xy()).unwrap();
        assert_eq!(cs.rescaling, expect);
        // common poly is squarefree
        let d = cs.common_poly.differentiate("x").unwrap();
        assert!(cs.common_poly.gcd(&d).unwrap().is_constant());
    }

    #[test]
    fn odd_power_rescale_op() {
        let vars = Vars::xy();
        let p = parse_poly("(x-y)^3*(x+y)", &vars).unwrap();
        let d = p.squarefree_factor().unwrap();
        let out = odd_power_rescale(&p, &d.factors).unwrap();
        assert_eq!(out.monic(), parse_poly("(x-y)*(x+y)", &vars).unwrap().monic());

        let sq = parse_poly("x-y", &vars).unwrap();
        let dsq = sq.squarefree_factor().unwrap();
        assert_eq!(odd_power_rescale(&sq, &dsq.factors).unwrap(), sq);

        let bad = parse_poly("(x-y)^2*(x+y)", &vars).unwrap();
        let dbad = bad.squarefree_factor().unwrap();
        assert!(matches!(
            odd_power_rescale(&bad, &dbad.factors),
            Err(CriticalSetError::EvenMultiplicity { .. })
        ));
    }

    #[test]
    fn transcritical_singular_point() {
        let cs = transcritical();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        assert_eq!(pts.len(), 1);
        let p = &pts[0];
        assert_eq!(p.location, Coord2::origin());
        assert_eq!(p.incident_branches.len(), 4);
        assert!(p.pairwise_transversal);
    }

    #[test]
    fn pitchfork_singular_point() {
        let cs = pitchfork();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].incident_branches.len(), 3);
        assert!(pts[0].pairwise_transversal);
    }

    #[test]
    fn parallel_lines_no_intersection() {
        let cs = build_critical_set(&field("(y-x)*(y-x-1)", "0")).unwrap();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn tangential_intersection_flagged() {
        // parabola y = x^2 and the line y = 0 meet tangentially at the origin
        let cs = build_critical_set(&field("(y - x^2)*y", "0")).unwrap();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(!pts[0].pairwise_transversal);
        assert_eq!(pts[0].tangential_pairs.len(), 1);
    }

    #[test]
    fn whitney_counts() {
        let cs = transcritical();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        let ws = whitney_stratify(&cs, &pts[0], &AnalysisBox::default()).unwrap();
        assert_eq!(ws.strata.len(), 9); // 2*4 + 1
        assert_eq!(ws.one_dimensional().count(), 8);

        let cs = pitchfork();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        let ws = whitney_stratify(&cs, &pts[0], &AnalysisBox::default()).unwrap();
        assert_eq!(ws.strata.len(), 7); // 2*3 + 1
    }

    #[test]
    fn whitney_two_branch_case() {
        let cs = build_critical_set(&field("(y-x)*(y+x)", "0")).unwrap();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        let ws = whitney_stratify(&cs, &pts[0], &AnalysisBox::default()).unwrap();
        assert_eq!(ws.strata.len(), 5); // four half-branches plus the point
        let relaxed = relaxed_stratifications(&ws);
        assert_eq!(relaxed.len(), 2);
        for r in &relaxed {
            assert!(r.smooth_branch().is_some());
            // joined stratum + two remaining halves
            assert_eq!(r.strata.len(), 3);
        }
    }

    #[test]
    fn relaxed_count_matches_branches() {
        let cs = transcritical();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        let ws = whitney_stratify(&cs, &pts[0], &AnalysisBox::default()).unwrap();
        let relaxed = relaxed_stratifications(&ws);
        assert_eq!(relaxed.len(), 4);
        // each relaxed member has a single smooth full branch
        for r in &relaxed {
            let full: Vec<_> = r
                .strata
                .iter()
                .filter(|s| matches!(s.carrier, StratumCarrier::FullBranch { .. }))
                .collect();
            assert_eq!(full.len(), 1);
        }
    }

    #[test]
    fn whitney_rejects_non_transversal() {
        let cs = build_critical_set(&field("(y - x^2)*y", "0")).unwrap();
        let pts = find_singular_points(&cs, &AnalysisBox::default()).unwrap();
        assert!(matches!(
            whitney_stratify(&cs, &pts[0], &AnalysisBox::default()),
            Err(CriticalSetError::NotTransversal)
        ));
    }

    #[test]
    fn branch_chart_samples_exactly() {
        let cs = pitchfork();
        // parabola branch: defining poly x^2 - y
        let parabola = cs
            .branches
            .iter()
            .find(|b| b.defining_poly.total_degree() == 2)
            .unwrap()
            .id;
        let origin = [Rational::zero(), Rational::zero()];
        let chart = BranchChart::at_exact(&cs, parabola, &origin).unwrap();
        let s = chart.sample(&cs, Side::Pos, &rat(1, 2)).unwrap();
        let p = s.as_exact().expect("rational point on the parabola");
        // y = x^2 on the sampled point
        assert_eq!(&p[0] * &p[0], p[1].clone());
    }
}
