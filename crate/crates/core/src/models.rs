//! Builders for standard Q-manifolds. Every builder funnels through
//! [`check_homological`], so a returned model always carries a certified
//! field.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{rational, Chart, Parity, SuperPolynomial};
use crate::error::{Error, Result};
use crate::lie::{check_homological, HomologicalField};
use crate::tensor::TensorField;

/// Name of the even coordinate appended by [`extend_with_r11`].
pub const EXTENSION_EVEN: &str = "_t";
/// Name of the odd coordinate appended by [`extend_with_r11`].
pub const EXTENSION_ODD: &str = "_th";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    OddTangent,
    ChevalleyEilenberg,
    LieAlgebroid,
    Custom,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::OddTangent => "odd-tangent",
            ModelKind::ChevalleyEilenberg => "chevalley-eilenberg",
            ModelKind::LieAlgebroid => "lie-algebroid",
            ModelKind::Custom => "custom",
        })
    }
}

/// Structure constants `c^k_{ij}` keyed by `(k, i, j)`.
pub type StructureConstants = BTreeMap<(usize, usize, usize), BigRational>;

#[derive(Clone, Debug)]
pub enum ModelParams {
    OddTangent {
        base_dim: usize,
    },
    ChevalleyEilenberg {
        dim: usize,
        structure_constants: StructureConstants,
    },
    LieAlgebroid {
        base_dim: usize,
        fiber_dim: usize,
        anchor: BTreeMap<(usize, usize), SuperPolynomial>,
        structure_functions: BTreeMap<(usize, usize, usize), SuperPolynomial>,
    },
    Custom,
    /// Product with ℝ^{1|1}; `base` describes the original model.
    Extended {
        base: Box<ModelDescriptor>,
    },
}

#[derive(Clone, Debug)]
pub struct ModelDescriptor {
    pub kind: ModelKind,
    pub name: String,
    pub params: ModelParams,
    pub q: HomologicalField,
}

impl ModelDescriptor {
    pub fn chart(&self) -> &Arc<Chart> {
        self.q.chart()
    }

    /// Wraps a user-supplied field after certifying it.
    pub fn custom(name: impl Into<String>, q: TensorField) -> Result<Self> {
        Ok(ModelDescriptor {
            kind: ModelKind::Custom,
            name: name.into(),
            params: ModelParams::Custom,
            q: check_homological(q)?,
        })
    }
}

/// `ΠTℝⁿ` with coordinates `x1..xn` (even), `dx1..dxn` (odd) and the de Rham
/// field `Q = Σ dxⁱ ∂_{xⁱ}`.
pub fn build_odd_tangent(base_dim: usize) -> Result<ModelDescriptor> {
    if base_dim == 0 {
        return Err(Error::Invalid("base dimension must be positive".into()));
    }
    let coords = (1..=base_dim)
        .map(|i| (format!("x{i}"), Parity::Even))
        .chain((1..=base_dim).map(|i| (format!("dx{i}"), Parity::Odd)));
    let chart = Chart::new(coords)?;
    let comps = (0..base_dim)
        .map(|i| Ok((i, SuperPolynomial::coordinate(&chart, base_dim + i)?)))
        .collect::<Result<Vec<_>>>()?;
    let q = TensorField::vector(&chart, Parity::Odd, comps)?;
    Ok(ModelDescriptor {
        kind: ModelKind::OddTangent,
        name: format!("odd tangent bundle of R^{base_dim}"),
        params: ModelParams::OddTangent { base_dim },
        q: check_homological(q)?,
    })
}

fn check_antisymmetric(dim: usize, c: &StructureConstants) -> Result<()> {
    for (&(k, i, j), v) in c {
        if k >= dim || i >= dim || j >= dim {
            return Err(Error::Invalid(format!(
                "structure constant ({k}, {i}, {j}) out of range for dimension {dim}"
            )));
        }
        let partner = c.get(&(k, j, i)).cloned().unwrap_or_else(BigRational::zero);
        if *v != -partner {
            return Err(Error::NotAntisymmetric { k, i, j });
        }
    }
    Ok(())
}

/// First triple `(i, j, l)` where the Jacobi identity fails, if any.
pub fn jacobi_violation(dim: usize, c: &StructureConstants) -> Option<(usize, usize, usize)> {
    let get = |k: usize, i: usize, j: usize| c.get(&(k, i, j)).cloned().unwrap_or_else(BigRational::zero);
    for i in 0..dim {
        for j in 0..dim {
            for l in 0..dim {
                for m in 0..dim {
                    let mut s = BigRational::zero();
                    for k in 0..dim {
                        s += get(k, i, j) * get(m, k, l);
                        s += get(k, j, l) * get(m, k, i);
                        s += get(k, l, i) * get(m, k, j);
                    }
                    if !s.is_zero() {
                        return Some((i, j, l));
                    }
                }
            }
        }
    }
    None
}

fn ce_chart(dim: usize) -> Result<Arc<Chart>> {
    Chart::new((1..=dim).map(|i| (format!("t{i}"), Parity::Odd)))
}

/// Quadratic part `−½ Σ c^k_{ij} θ^i θ^j` of a Chevalley–Eilenberg type field
/// for one output index `k`, with `θ^i` the coordinates at `offset + i`.
fn quadratic_component(
    chart: &Arc<Chart>,
    offset: usize,
    entries: impl Iterator<Item = (usize, usize, SuperPolynomial)>,
) -> Result<SuperPolynomial> {
    let half = rational(-1, 2);
    let mut out = SuperPolynomial::zero(chart);
    for (i, j, coeff) in entries {
        let ti = SuperPolynomial::coordinate(chart, offset + i)?;
        let tj = SuperPolynomial::coordinate(chart, offset + j)?;
        out.add_assign_ref(&(&coeff * &(&ti * &tj)).scale(&half));
    }
    Ok(out)
}

/// Chevalley–Eilenberg field `Q^k = −½ c^k_{ij} θ^i θ^j` on `Πg` with odd
/// coordinates `t1..tq`. Fails with [`Error::Jacobi`]
/// (the offending triple and the nonzero `[Q,Q]` components) when the
/// constants do not define a Lie algebra.
pub fn build_chevalley_eilenberg(dim: usize, structure_constants: &StructureConstants) -> Result<ModelDescriptor> {
    if dim == 0 {
        return Err(Error::Invalid("Lie algebra dimension must be positive".into()));
    }
    check_antisymmetric(dim, structure_constants)?;
    let chart = ce_chart(dim)?;
    let mut comps = Vec::new();
    for k in 0..dim {
        let entries = structure_constants
            .iter()
            .filter(|(&(kk, _, _), _)| kk == k)
            .map(|(&(_, i, j), v)| (i, j, SuperPolynomial::constant(&chart, v.clone())));
        comps.push((k, quadratic_component(&chart, 0, entries)?));
    }
    let q = TensorField::vector(&chart, Parity::Odd, comps)?;
    let q = match check_homological(q) {
        Ok(q) => q,
        Err(Error::NotHomological(report)) => {
            let (i, j, l) = jacobi_violation(dim, structure_constants).unwrap_or((0, 0, 0));
            return Err(Error::Jacobi {
                triple: (i, j, l),
                report,
            });
        }
        Err(e) => return Err(e),
    };
    Ok(ModelDescriptor {
        kind: ModelKind::ChevalleyEilenberg,
        name: format!("Chevalley-Eilenberg field of a {dim}-dimensional Lie algebra"),
        params: ModelParams::ChevalleyEilenberg {
            dim,
            structure_constants: structure_constants.clone(),
        },
        q,
    })
}

/// Chart `x1..xn` (even) followed by `t1..tq` (odd) used by
/// [`build_lie_algebroid`]; anchor and structure functions are expressed on
/// this chart.
pub fn algebroid_chart(base_dim: usize, fiber_dim: usize) -> Result<Arc<Chart>> {
    Chart::new(
        (1..=base_dim)
            .map(|i| (format!("x{i}"), Parity::Even))
            .chain((1..=fiber_dim).map(|a| (format!("t{a}"), Parity::Odd))),
    )
}

/// Lie algebroid field
/// `Q = Σ θ^a ρ^i_a(x) ∂_{x^i} − ½ Σ C^c_{ab}(x) θ^a θ^b ∂_{θ^c}`
/// on [`algebroid_chart`]. `anchor` is keyed by `(i, a)`, `structure`
/// by `(c, a, b)`; all entries must be even functions of the base
/// coordinates.
pub fn build_lie_algebroid(
    chart: &Arc<Chart>,
    base_dim: usize,
    fiber_dim: usize,
    anchor: BTreeMap<(usize, usize), SuperPolynomial>,
    structure: BTreeMap<(usize, usize, usize), SuperPolynomial>,
) -> Result<ModelDescriptor> {
    if chart.dim() != base_dim + fiber_dim
        || (0..base_dim).any(|i| chart.parity(i).is_odd())
        || (base_dim..chart.dim()).any(|i| chart.parity(i).is_even())
    {
        return Err(Error::Invalid("chart does not match the algebroid layout".into()));
    }
    let base_only = |p: &SuperPolynomial| {
        p.terms()
            .all(|(m, _)| (base_dim..chart.dim()).all(|i| m.exponent(i) == 0))
    };
    for (&(i, a), v) in &anchor {
        if i >= base_dim || a >= fiber_dim || !base_only(v) {
            return Err(Error::Invalid(format!("invalid anchor entry ({i}, {a})")));
        }
    }
    for (&(c, a, b), v) in &structure {
        if c >= fiber_dim || a >= fiber_dim || b >= fiber_dim || !base_only(v) {
            return Err(Error::Invalid(format!("invalid structure function ({c}, {a}, {b})")));
        }
        let partner = structure
            .get(&(c, b, a))
            .cloned()
            .unwrap_or_else(|| SuperPolynomial::zero(chart));
        if *v != -partner {
            return Err(Error::NotAntisymmetric { k: c, i: a, j: b });
        }
    }
    let mut comps = Vec::new();
    for i in 0..base_dim {
        let mut qi = SuperPolynomial::zero(chart);
        for a in 0..fiber_dim {
            if let Some(rho) = anchor.get(&(i, a)) {
                let ta = SuperPolynomial::coordinate(chart, base_dim + a)?;
                qi.add_assign_ref(&(&ta * rho));
            }
        }
        comps.push((i, qi));
    }
    for c in 0..fiber_dim {
        let entries = structure
            .iter()
            .filter(|(&(cc, _, _), _)| cc == c)
            .map(|(&(_, a, b), v)| (a, b, v.clone()));
        comps.push((base_dim + c, quadratic_component(chart, base_dim, entries)?));
    }
    let q = TensorField::vector(chart, Parity::Odd, comps)?;
    Ok(ModelDescriptor {
        kind: ModelKind::LieAlgebroid,
        name: format!("Lie algebroid of rank {fiber_dim} over R^{base_dim}"),
        params: ModelParams::LieAlgebroid {
            base_dim,
            fiber_dim,
            anchor,
            structure_functions: structure,
        },
        q: check_homological(q)?,
    })
}

/// `M × ℝ^{1|1}` with `Q̃ = Q + θ ∂_t`, appending the reserved coordinates
/// [`EXTENSION_EVEN`] and [`EXTENSION_ODD`].
pub fn extend_with_r11(model: &ModelDescriptor) -> Result<ModelDescriptor> {
    let chart = model.chart();
    let ext = chart.extended([(EXTENSION_EVEN, Parity::Even), (EXTENSION_ODD, Parity::Odd)])?;
    let (t, th) = (chart.dim(), chart.dim() + 1);
    let lifted = model.q.field().embed(&ext)?;
    let shift = TensorField::vector(&ext, Parity::Odd, [(t, SuperPolynomial::coordinate(&ext, th)?)])?;
    let q = lifted.checked_add(&shift)?;
    Ok(ModelDescriptor {
        kind: model.kind,
        name: format!("{} x R^(1|1)", model.name),
        params: ModelParams::Extended {
            base: Box::new(model.clone()),
        },
        q: check_homological(q)?,
    })
}

/// Structure constants from `(k, i, j, value)` entries with `i < j`; the
/// antisymmetric partners are filled in.
pub fn antisymmetrized(entries: &[(usize, usize, usize, BigRational)]) -> StructureConstants {
    let mut out = StructureConstants::new();
    for (k, i, j, v) in entries {
        out.insert((*k, *i, *j), v.clone());
        out.insert((*k, *j, *i), -v.clone());
    }
    out
}

/// The abelian Lie algebra of the given dimension.
pub fn abelian(dim: usize) -> Result<ModelDescriptor> {
    build_chevalley_eilenberg(dim, &StructureConstants::new())
}

/// The two-dimensional non-abelian algebra `[e1, e2] = e2`.
pub fn affine_2d() -> Result<ModelDescriptor> {
    build_chevalley_eilenberg(2, &antisymmetrized(&[(1, 0, 1, BigRational::one())]))
}

/// `sl(2)` in the basis `h, e, f` with `[h,e] = 2e`, `[h,f] = −2f`,
/// `[e,f] = h`.
pub fn sl2() -> Result<ModelDescriptor> {
    build_chevalley_eilenberg(
        3,
        &antisymmetrized(&[
            (1, 0, 1, rational(2, 1)),
            (2, 0, 2, rational(-2, 1)),
            (0, 1, 2, rational(1, 1)),
        ]),
    )
}

/// Action algebroid of the affine algebra on ℝ: `e1 ↦ x∂_x`, `e2 ↦ ∂_x`.
/// With this anchor the bracket `[e1, e2] = −e2` makes the anchor a Lie
/// algebra morphism; the algebra is the affine one up to `e1 ↦ −e1`.
pub fn affine_action_algebroid() -> Result<ModelDescriptor> {
    let chart = algebroid_chart(1, 2)?;
    let x = SuperPolynomial::coordinate(&chart, 0)?;
    let mut anchor = BTreeMap::new();
    anchor.insert((0, 0), x);
    anchor.insert((0, 1), SuperPolynomial::one(&chart));
    let mut structure = BTreeMap::new();
    structure.insert((1, 0, 1), SuperPolynomial::integer(&chart, -1));
    structure.insert((1, 1, 0), SuperPolynomial::integer(&chart, 1));
    build_lie_algebroid(&chart, 1, 2, anchor, structure)
}

/// Rank-one algebroid over ℝ with anchor `x∂_x`: `Q = x t1 ∂_x`.
pub fn euler_line_algebroid() -> Result<ModelDescriptor> {
    let chart = algebroid_chart(1, 1)?;
    let mut anchor = BTreeMap::new();
    anchor.insert((0, 0), SuperPolynomial::coordinate(&chart, 0)?);
    build_lie_algebroid(&chart, 1, 1, anchor, BTreeMap::new())
}
