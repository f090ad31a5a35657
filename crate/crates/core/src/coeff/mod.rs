//! Symbolic coefficient algebra: bounded functions on the group built from
//! constants, C₀ functions, slowly oscillating catalog generators and
//! periodic tables, closed under translation, sums, products and scaling.

mod cluster;
mod probe;

pub use cluster::cluster_range;
pub use probe::{
    asymptotic_coefficient, sufficient_family, sufficient_family_for, LeafLimit, Probe, ProbeOptions,
    QuasiOrbitSpec,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, FactorKind, GroupSpec};
use crate::numeric::{cx, cx_vec, norm2_sq, Dd};

/// Finitely supported or decaying C₀ function with its decay certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VanishingFn {
    /// Explicit finitely supported values.
    Support(Vec<SupportPoint>),
    /// `amplitude · exp(−rate·|x|₁)` on the integer part, `rate > 0`.
    ExpDecay {
        #[serde(with = "cx")]
        amplitude: Complex64,
        rate: f64,
    },
    /// `amplitude · (1 + |x|₁)^(−power)`, `power > 0`.
    PowerDecay {
        #[serde(with = "cx")]
        amplitude: Complex64,
        power: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportPoint {
    pub element: Element,
    #[serde(with = "cx")]
    pub value: Complex64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArctanMode {
    /// `arctan(n/s)` on ℤ; cluster set {±π/2}.
    #[default]
    Signed,
    /// `arctan(|x|₂/s)`; cluster set {π/2}.
    Radial,
}

/// Audited slowly oscillating generators. All are real valued.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SoGenerator {
    /// `sin(|x|₂^{1/2})`, cluster set [−1, 1].
    SinSqrt,
    /// `cos(|x|₂^{1/2})`, cluster set [−1, 1].
    CosSqrt,
    Arctan {
        scale: f64,
        #[serde(default)]
        mode: ArctanMode,
    },
}

impl SoGenerator {
    pub fn uses_sqrt_phase(&self) -> bool {
        matches!(self, SoGenerator::SinSqrt | SoGenerator::CosSqrt)
    }

    fn sup(&self) -> f64 {
        match self {
            SoGenerator::Arctan { .. } => std::f64::consts::FRAC_PI_2,
            _ => 1.0,
        }
    }

    /// Value at an integer vector (the coordinates of the leaf's factor).
    pub fn eval(&self, ints: &[i64]) -> f64 {
        match *self {
            SoGenerator::SinSqrt => Dd::sqrt_norm(ints).sin_cos().0,
            SoGenerator::CosSqrt => Dd::sqrt_norm(ints).sin_cos().1,
            SoGenerator::Arctan { scale, mode } => match mode {
                ArctanMode::Signed => (ints[0] as f64 / scale).atan(),
                ArctanMode::Radial => ((norm2_sq(ints) as f64).sqrt() / scale).atan(),
            },
        }
    }

    /// Closed-form limit along an escape in direction `sign` (±1 on ℤ,
    /// +1 otherwise) at square-root phase `phase`.
    pub fn analytic_limit(&self, sign: i64, phase: Option<f64>) -> f64 {
        match *self {
            SoGenerator::SinSqrt => phase.map_or(f64::NAN, f64::sin),
            SoGenerator::CosSqrt => phase.map_or(f64::NAN, f64::cos),
            SoGenerator::Arctan { scale, mode } => match mode {
                ArctanMode::Signed => (sign as f64 * scale.signum()) * std::f64::consts::FRAC_PI_2,
                ArctanMode::Radial => std::f64::consts::FRAC_PI_2 * scale.signum(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSymbol {
    Constant {
        #[serde(with = "cx")]
        value: Complex64,
    },
    Vanishing {
        function: VanishingFn,
    },
    SlowlyOscillating {
        generator: SoGenerator,
        /// Index into the flattened factors of the group; must be a ℤⁿ factor.
        #[serde(default)]
        factor: usize,
    },
    /// Table indexed by residues of the integer part modulo `period`
    /// (first coordinate slowest), optionally times the finite part.
    Periodic {
        period: Vec<i64>,
        #[serde(with = "cx_vec")]
        values: Vec<Complex64>,
    },
    Translate {
        by: Element,
        child: Box<CoefficientSymbol>,
    },
    Sum {
        children: Vec<CoefficientSymbol>,
    },
    Product {
        children: Vec<CoefficientSymbol>,
    },
    Scale {
        #[serde(with = "cx")]
        lambda: Complex64,
        child: Box<CoefficientSymbol>,
    },
}

/// Class lattice used for dispatch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffClass {
    Constant,
    Vanishing,
    SlowlyOscillating,
    Periodic,
    PeriodicSo,
}

impl CoeffClass {
    /// Class of a sum.
    pub fn join(self, o: CoeffClass) -> CoeffClass {
        use CoeffClass::*;
        match (self, o) {
            (a, b) if a == b => a,
            (Constant, x) | (x, Constant) => match x {
                Vanishing => SlowlyOscillating,
                other => other,
            },
            (PeriodicSo, _) | (_, PeriodicSo) => PeriodicSo,
            (Periodic, _) | (_, Periodic) => PeriodicSo,
            _ => SlowlyOscillating,
        }
    }

    /// Class of a product; C₀ is an ideal.
    pub fn meet(self, o: CoeffClass) -> CoeffClass {
        use CoeffClass::*;
        match (self, o) {
            (Vanishing, _) | (_, Vanishing) => Vanishing,
            (Constant, x) | (x, Constant) => x,
            (a, b) if a == b => a,
            _ => PeriodicSo,
        }
    }

    /// True for classes contained in SO(G) (constants and C₀ included).
    pub fn is_slowly_oscillating(self) -> bool {
        matches!(
            self,
            CoeffClass::Constant | CoeffClass::Vanishing | CoeffClass::SlowlyOscillating
        )
    }
}

pub(crate) fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl CoefficientSymbol {
    pub fn constant(v: impl Into<Complex64>) -> Self {
        CoefficientSymbol::Constant { value: v.into() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn so(generator: SoGenerator, factor: usize) -> Self {
        CoefficientSymbol::SlowlyOscillating { generator, factor }
    }

    pub fn sin_sqrt() -> Self {
        Self::so(SoGenerator::SinSqrt, 0)
    }

    pub fn arctan(scale: f64) -> Self {
        Self::so(
            SoGenerator::Arctan {
                scale,
                mode: ArctanMode::Signed,
            },
            0,
        )
    }

    pub fn periodic(period: Vec<i64>, values: Vec<Complex64>) -> Self {
        CoefficientSymbol::Periodic { period, values }
    }

    pub fn support(points: Vec<(Element, Complex64)>) -> Self {
        CoefficientSymbol::Vanishing {
            function: VanishingFn::Support(
                points
                    .into_iter()
                    .map(|(element, value)| SupportPoint { element, value })
                    .collect(),
            ),
        }
    }

    pub fn sum(children: Vec<CoefficientSymbol>) -> Self {
        CoefficientSymbol::Sum { children }
    }

    pub fn product(children: Vec<CoefficientSymbol>) -> Self {
        CoefficientSymbol::Product { children }
    }

    pub fn scaled(self, lambda: impl Into<Complex64>) -> Self {
        CoefficientSymbol::Scale {
            lambda: lambda.into(),
            child: Box::new(self),
        }
    }

    pub fn translated(self, by: Element) -> Self {
        CoefficientSymbol::Translate {
            by,
            child: Box::new(self),
        }
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        match self {
            CoefficientSymbol::Constant { value } => Some(*value),
            _ => None,
        }
    }

    /// Canonical serialization, used as a sort and merge key.
    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("symbols serialize")
    }

    pub fn class(&self) -> CoeffClass {
        use CoefficientSymbol::*;
        match self {
            Constant { .. } => CoeffClass::Constant,
            Vanishing { .. } => CoeffClass::Vanishing,
            SlowlyOscillating { .. } => CoeffClass::SlowlyOscillating,
            Periodic { .. } => CoeffClass::Periodic,
            Translate { child, .. } | Scale { child, .. } => child.class(),
            Sum { children } => children
                .iter()
                .map(|c| c.class())
                .reduce(CoeffClass::join)
                .unwrap_or(CoeffClass::Constant),
            Product { children } => children
                .iter()
                .map(|c| c.class())
                .reduce(CoeffClass::meet)
                .unwrap_or(CoeffClass::Constant),
        }
    }

    /// Structural validation against a group.
    pub fn validate(&self, g: &GroupSpec) -> Result<()> {
        use CoefficientSymbol::*;
        let bad = |m: String| Err(Error::InvalidCoefficient(m));
        match self {
            Constant { value } => {
                if !value.is_finite() {
                    return bad("non-finite constant".into());
                }
            }
            Vanishing { function } => match function {
                VanishingFn::Support(pts) => {
                    for p in pts {
                        g.validate(&p.element)?;
                        if !p.value.is_finite() {
                            return bad("non-finite support value".into());
                        }
                    }
                }
                VanishingFn::ExpDecay { amplitude, rate } => {
                    if !(rate.is_finite() && *rate > 0.0 && amplitude.is_finite()) {
                        return bad(format!("exp_decay needs a positive finite rate, got {rate}"));
                    }
                }
                VanishingFn::PowerDecay { amplitude, power } => {
                    if !(power.is_finite() && *power > 0.0 && amplitude.is_finite()) {
                        return bad(format!("power_decay needs a positive finite power, got {power}"));
                    }
                }
            },
            SlowlyOscillating { generator, factor } => {
                let f = g
                    .factors()
                    .get(*factor)
                    .ok_or_else(|| Error::InvalidCoefficient(format!("factor {factor} does not exist")))?;
                let d = match f.kind {
                    FactorKind::Zn(d) => d,
                    FactorKind::Finite(_) => {
                        return bad(format!("slowly oscillating leaf on finite factor {factor}"));
                    }
                };
                if let SoGenerator::Arctan { scale, mode } = generator {
                    if !(scale.is_finite() && *scale != 0.0) {
                        return bad(format!("arctan scale must be finite and non-zero, got {scale}"));
                    }
                    if *mode == ArctanMode::Signed && d != 1 {
                        return bad("signed arctan needs a one-dimensional factor".into());
                    }
                }
            }
            Periodic { period, values } => {
                if period.len() != g.int_dim() {
                    return bad(format!(
                        "period has {} entries, group has {} integer coordinates",
                        period.len(),
                        g.int_dim()
                    ));
                }
                if period.iter().any(|&p| p <= 0) {
                    return bad("periods must be positive".into());
                }
                let cells: i64 = period.iter().product();
                let n = values.len() as i64;
                if n != cells && n != cells * g.finite_order() as i64 {
                    return bad(format!(
                        "periodic table has {n} values, expected {cells} or {}",
                        cells * g.finite_order() as i64
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("non-finite periodic value".into());
                }
            }
            Translate { by, child } => {
                g.validate(by)?;
                child.validate(g)?;
            }
            Sum { children } | Product { children } => {
                if children.is_empty() {
                    return bad("empty sum or product".into());
                }
                for c in children {
                    c.validate(g)?;
                }
            }
            Scale { lambda, child } => {
                if !lambda.is_finite() {
                    return bad("non-finite scale".into());
                }
                child.validate(g)?;
            }
        }
        Ok(())
    }

    /// Pointwise value at `q`.
    pub fn evaluate(&self, g: &GroupSpec, q: &Element) -> Complex64 {
        use CoefficientSymbol::*;
        match self {
            Constant { value } => *value,
            Vanishing { function } => match function {
                VanishingFn::Support(pts) => pts
                    .iter()
                    .filter(|p| &p.element == q)
                    .map(|p| p.value)
                    .sum(),
                VanishingFn::ExpDecay { amplitude, rate } => amplitude * (-rate * q.int_l1() as f64).exp(),
                VanishingFn::PowerDecay { amplitude, power } => {
                    amplitude * (1.0 + q.int_l1() as f64).powf(-power)
                }
            },
            SlowlyOscillating { generator, factor } => {
                let r = g.factors()[*factor].int_range();
                Complex64::new(generator.eval(&q.ints[r]), 0.0)
            }
            Periodic { period, values } => values[periodic_index(g, period, values.len(), q)],
            Translate { by, child } => child.evaluate(g, &g.mul(&g.inv(by), q)),
            Sum { children } => children.iter().map(|c| c.evaluate(g, q)).sum(),
            Product { children } => children.iter().map(|c| c.evaluate(g, q)).product(),
            Scale { lambda, child } => lambda * child.evaluate(g, q),
        }
    }

    /// Left translation: `translate(a, y)(q) = a(y⁻¹q)`.
    pub fn translate(&self, g: &GroupSpec, y: &Element) -> CoefficientSymbol {
        self.clone().translated(y.clone()).simplify(g)
    }

    /// Complex conjugate, pushed to the leaves.
    pub fn conj(&self) -> CoefficientSymbol {
        use CoefficientSymbol::*;
        match self {
            Constant { value } => Constant { value: value.conj() },
            Vanishing { function } => Vanishing {
                function: match function {
                    VanishingFn::Support(pts) => VanishingFn::Support(
                        pts.iter()
                            .map(|p| SupportPoint {
                                element: p.element.clone(),
                                value: p.value.conj(),
                            })
                            .collect(),
                    ),
                    VanishingFn::ExpDecay { amplitude, rate } => VanishingFn::ExpDecay {
                        amplitude: amplitude.conj(),
                        rate: *rate,
                    },
                    VanishingFn::PowerDecay { amplitude, power } => VanishingFn::PowerDecay {
                        amplitude: amplitude.conj(),
                        power: *power,
                    },
                },
            },
            SlowlyOscillating { .. } => self.clone(),
            Periodic { period, values } => Periodic {
                period: period.clone(),
                values: values.iter().map(|v| v.conj()).collect(),
            },
            Translate { by, child } => Translate {
                by: by.clone(),
                child: Box::new(child.conj()),
            },
            Sum { children } => Sum {
                children: children.iter().map(|c| c.conj()).collect(),
            },
            Product { children } => Product {
                children: children.iter().map(|c| c.conj()).collect(),
            },
            Scale { lambda, child } => Scale {
                lambda: lambda.conj(),
                child: Box::new(child.conj()),
            },
        }
    }

    /// Upper bound for `sup_q |a(q)|`.
    pub fn sup_bound(&self) -> f64 {
        use CoefficientSymbol::*;
        match self {
            Constant { value } => value.norm(),
            Vanishing { function } => match function {
                VanishingFn::Support(pts) => pts.iter().map(|p| p.value.norm()).fold(0.0, f64::max),
                VanishingFn::ExpDecay { amplitude, .. } | VanishingFn::PowerDecay { amplitude, .. } => {
                    amplitude.norm()
                }
            },
            SlowlyOscillating { generator, .. } => generator.sup(),
            Periodic { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Translate { child, .. } => child.sup_bound(),
            Sum { children } => children.iter().map(|c| c.sup_bound()).sum(),
            Product { children } => children.iter().map(|c| c.sup_bound()).product(),
            Scale { lambda, child } => lambda.norm() * child.sup_bound(),
        }
    }

    /// Lipschitz constant of the asymptotic value as a function of the
    /// square-root phase (sin/cos leaves contribute 1).
    pub fn phase_lipschitz(&self) -> f64 {
        use CoefficientSymbol::*;
        match self {
            SlowlyOscillating { generator, .. } if generator.uses_sqrt_phase() => 1.0,
            Constant { .. } | Vanishing { .. } | SlowlyOscillating { .. } | Periodic { .. } => 0.0,
            Translate { child, .. } => child.phase_lipschitz(),
            Scale { lambda, child } => lambda.norm() * child.phase_lipschitz(),
            Sum { children } => children.iter().map(|c| c.phase_lipschitz()).sum(),
            Product { children } => {
                let sups: Vec<f64> = children.iter().map(|c| c.sup_bound()).collect();
                children
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let others: f64 = sups
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| *j != i)
                            .map(|(_, s)| s)
                            .product();
                        c.phase_lipschitz() * others
                    })
                    .sum()
            }
        }
    }

    /// Visits every node, parents first.
    pub fn visit(&self, f: &mut dyn FnMut(&CoefficientSymbol)) {
        use CoefficientSymbol::*;
        f(self);
        match self {
            Translate { child, .. } | Scale { child, .. } => child.visit(f),
            Sum { children } | Product { children } => children.iter().for_each(|c| c.visit(f)),
            _ => {}
        }
    }

    /// Slowly oscillating leaves as `(generator, factor)`.
    pub fn so_leaves(&self) -> Vec<(SoGenerator, usize)> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if let CoefficientSymbol::SlowlyOscillating { generator, factor } = n {
                if !out.contains(&(*generator, *factor)) {
                    out.push((*generator, *factor));
                }
            }
        });
        out
    }

    /// Periods of all periodic leaves.
    pub fn periods(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if let CoefficientSymbol::Periodic { period, .. } = n {
                out.push(period.clone());
            }
        });
        out
    }

    /// Canonical form: constants folded, sums and products flattened and
    /// sorted, translations pushed to the leaves and absorbed where the
    /// leaf admits it.
    pub fn simplify(&self, g: &GroupSpec) -> CoefficientSymbol {
        use CoefficientSymbol::*;
        match self {
            Constant { .. } | SlowlyOscillating { .. } => self.clone(),
            Vanishing { function } => match function {
                VanishingFn::Support(pts) => {
                    let mut merged: std::collections::BTreeMap<Element, Complex64> = Default::default();
                    for p in pts {
                        *merged.entry(p.element.clone()).or_insert_with(czero) += p.value;
                    }
                    merged.retain(|_, v| *v != czero());
                    if merged.is_empty() {
                        return CoefficientSymbol::constant(0.0);
                    }
                    CoefficientSymbol::support(merged.into_iter().collect())
                }
                _ => self.clone(),
            },
            Periodic { values, .. } => {
                if values.iter().all(|v| *v == values[0]) {
                    CoefficientSymbol::Constant { value: values[0] }
                } else {
                    self.clone()
                }
            }
            Scale { lambda, child } => scale_node(*lambda, child.simplify(g)),
            Translate { by, child } => translate_node(g, by, child.simplify(g)),
            Sum { children } => {
                let mut flat = Vec::new();
                let mut c = czero();
                for ch in children {
                    match ch.simplify(g) {
                        Constant { value } => c += value,
                        Sum { children } => {
                            for x in children {
                                match x {
                                    Constant { value } => c += value,
                                    other => flat.push(other),
                                }
                            }
                        }
                        other => flat.push(other),
                    }
                }
                if c != czero() || flat.is_empty() {
                    flat.push(Constant { value: c });
                }
                if flat.len() == 1 {
                    return flat.pop().unwrap();
                }
                flat.sort_by_key(|x| x.key());
                Sum { children: flat }
            }
            Product { children } => {
                let mut flat = Vec::new();
                let mut c = Complex64::new(1.0, 0.0);
                for ch in children {
                    match ch.simplify(g) {
                        Constant { value } => c *= value,
                        Scale { lambda, child } => {
                            c *= lambda;
                            flat.push(*child);
                        }
                        Product { children } => {
                            for x in children {
                                match x {
                                    Constant { value } => c *= value,
                                    other => flat.push(other),
                                }
                            }
                        }
                        other => flat.push(other),
                    }
                }
                if c == czero() || flat.is_empty() {
                    return Constant { value: c };
                }
                let inner = if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    flat.sort_by_key(|x| x.key());
                    Product { children: flat }
                };
                scale_node(c, inner)
            }
        }
    }
}

fn scale_node(lambda: Complex64, child: CoefficientSymbol) -> CoefficientSymbol {
    use CoefficientSymbol::*;
    if lambda == Complex64::new(1.0, 0.0) {
        return child;
    }
    if lambda == czero() {
        return Constant { value: czero() };
    }
    match child {
        Constant { value } => Constant { value: lambda * value },
        Scale { lambda: mu, child } => scale_node(lambda * mu, *child),
        Periodic { period, values } => Periodic {
            period,
            values: values.into_iter().map(|v| lambda * v).collect(),
        },
        Vanishing {
            function: VanishingFn::Support(pts),
        } => Vanishing {
            function: VanishingFn::Support(
                pts.into_iter()
                    .map(|p| SupportPoint {
                        element: p.element,
                        value: lambda * p.value,
                    })
                    .collect(),
            ),
        },
        other => Scale {
            lambda,
            child: Box::new(other),
        },
    }
}

fn translate_node(g: &GroupSpec, y: &Element, child: CoefficientSymbol) -> CoefficientSymbol {
    use CoefficientSymbol::*;
    if *y == g.identity() {
        return child;
    }
    match child {
        Constant { .. } => child,
        Sum { children } => Sum {
            children: children.into_iter().map(|c| translate_node(g, y, c)).collect(),
        }
        .simplify(g),
        Product { children } => Product {
            children: children.into_iter().map(|c| translate_node(g, y, c)).collect(),
        }
        .simplify(g),
        Scale { lambda, child } => scale_node(lambda, translate_node(g, y, *child)),
        Translate { by, child } => translate_node(g, &g.mul(y, &by), *child),
        Periodic { period, values } => {
            let src = Periodic {
                period: period.clone(),
                values: values.clone(),
            };
            let finite_dep = values.len() as i64 != period.iter().product::<i64>();
            let yinv = g.inv(y);
            let values = (0..values.len())
                .map(|k| src.evaluate(g, &g.mul(&yinv, &periodic_cell(g, &period, finite_dep, k))))
                .collect();
            Periodic { period, values }
        }
        Vanishing {
            function: VanishingFn::Support(pts),
        } => Vanishing {
            function: VanishingFn::Support(
                pts.into_iter()
                    .map(|p| SupportPoint {
                        element: g.mul(y, &p.element),
                        value: p.value,
                    })
                    .collect(),
            ),
        }
        .simplify(g),
        other => Translate {
            by: y.clone(),
            child: Box::new(other),
        },
    }
}

/// Table slot of `q` in a periodic table.
pub(crate) fn periodic_index(g: &GroupSpec, period: &[i64], len: usize, q: &Element) -> usize {
    let mut idx = 0usize;
    for (i, &p) in period.iter().enumerate() {
        idx = idx * p as usize + q.ints[i].rem_euclid(p) as usize;
    }
    let cells: i64 = period.iter().product();
    if len as i64 != cells {
        idx = idx * g.finite_order() + g.finite_flat_index(&q.idx);
    }
    idx
}

/// Representative element of table slot `k`.
pub(crate) fn periodic_cell(g: &GroupSpec, period: &[i64], finite_dep: bool, k: usize) -> Element {
    let (mut rest, fin) = if finite_dep {
        (k / g.finite_order(), g.finite_from_flat(k % g.finite_order()))
    } else {
        (k, g.identity().idx)
    };
    let mut ints = vec![0i64; period.len()];
    for i in (0..period.len()).rev() {
        ints[i] = (rest % period[i] as usize) as i64;
        rest /= period[i] as usize;
    }
    Element::new(ints, fin)
}

/// Sampled check of the slowly oscillating property: for each radius `R`
/// in `radii`, the largest `|a(x+y) − a(x)|` over sampled `x` with
/// `|x|∞ ≈ R` and unit steps `y`.
pub fn oscillation_profile(a: &CoefficientSymbol, g: &GroupSpec, radii: &[i64], samples: usize) -> Vec<f64> {
    let d = g.int_dim();
    let steps: Vec<Element> = (0..d)
        .flat_map(|i| {
            [1, -1].into_iter().map(move |s| {
                let mut v = vec![0; d];
                v[i] = s;
                v
            })
        })
        .map(|v| Element::new(v, g.identity().idx))
        .collect();
    radii
        .iter()
        .map(|&r| {
            let mut worst: f64 = 0.0;
            for k in 0..samples {
                // Deterministic spread of points on the sphere of radius r.
                let t = k as f64 / samples as f64 * std::f64::consts::TAU;
                let mut ints = vec![0i64; d];
                if d == 1 {
                    ints[0] = if k % 2 == 0 { r + k as i64 } else { -r - k as i64 };
                } else {
                    ints[0] = (r as f64 * t.cos()).round() as i64;
                    ints[1] = (r as f64 * t.sin()).round() as i64;
                }
                let x = Element::new(ints, g.identity().idx);
                let ax = a.evaluate(g, &x);
                for y in &steps {
                    worst = worst.max((a.evaluate(g, &g.mul(&x, y)) - ax).norm());
                }
            }
            worst
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{s3, GroupSpec};

    fn z1() -> GroupSpec {
        GroupSpec::zn(1).unwrap()
    }
    fn n(v: i64) -> Element {
        Element::zn([v])
    }
    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn evaluate_examples() {
        let g = z1();
        assert_eq!(CoefficientSymbol::constant(2.5).evaluate(&g, &n(17)), re(2.5));
        let p = CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(-1.0)]);
        assert_eq!(p.evaluate(&g, &n(5)), re(-1.0));
        assert_eq!(p.evaluate(&g, &n(-3)), re(-1.0));
        let s = CoefficientSymbol::sum(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::sin_sqrt()]);
        assert_eq!(s.evaluate(&g, &n(0)), re(2.0));
        assert!((s.evaluate(&g, &n(16)).re - (2.0 + 4f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn translation_examples() {
        let g = z1();
        let c = CoefficientSymbol::constant(3.0);
        assert_eq!(c.translate(&g, &n(4)), c);
        let p = CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(-1.0)]);
        let t = p.translate(&g, &n(1));
        for k in -5..5 {
            assert_eq!(t.evaluate(&g, &n(k)), p.evaluate(&g, &n(k - 1)));
        }
        assert!(matches!(t, CoefficientSymbol::Periodic { .. }));
    }

    #[test]
    fn nested_translation_composes() {
        let g = z1();
        let a = CoefficientSymbol::product(vec![
            CoefficientSymbol::sin_sqrt(),
            CoefficientSymbol::periodic(vec![3], vec![re(1.0), re(2.0), re(5.0)]),
        ]);
        let (y, z) = (n(2), n(-7));
        let lhs = a.translate(&g, &y).translate(&g, &z);
        let rhs = a.translate(&g, &g.mul(&z, &y));
        for k in -20..20 {
            assert!((lhs.evaluate(&g, &n(k)) - rhs.evaluate(&g, &n(k))).norm() < 1e-14);
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn finite_dependent_periodic_translation() {
        let g = GroupSpec::product(vec![z1(), GroupSpec::finite(s3())]).unwrap();
        let vals: Vec<Complex64> = (0..12).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let p = CoefficientSymbol::periodic(vec![2], vals);
        p.validate(&g).unwrap();
        let y = Element::new(vec![3], vec![4]);
        let t = p.translate(&g, &y);
        for q in g.enumerate_window(3).unwrap() {
            assert_eq!(t.evaluate(&g, &q), p.evaluate(&g, &g.mul(&g.inv(&y), &q)));
        }
    }

    #[test]
    fn class_lattice() {
        use CoeffClass::*;
        let v = CoefficientSymbol::support(vec![(n(0), re(10.0))]);
        let p = CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(-1.0)]);
        let s = CoefficientSymbol::arctan(1.0);
        assert_eq!(CoefficientSymbol::sum(vec![CoefficientSymbol::one(), v.clone()]).class(), SlowlyOscillating);
        assert_eq!(CoefficientSymbol::product(vec![p.clone(), v.clone()]).class(), Vanishing);
        assert_eq!(CoefficientSymbol::product(vec![p.clone(), s.clone()]).class(), PeriodicSo);
        assert_eq!(CoefficientSymbol::sum(vec![p.clone(), CoefficientSymbol::one()]).class(), Periodic);
        assert_eq!(CoefficientSymbol::sum(vec![s.clone(), s]).class(), SlowlyOscillating);
        assert_eq!(p.translate(&z1(), &n(1)).class(), Periodic);
    }

    #[test]
    fn simplify_folds() {
        let g = z1();
        let a = CoefficientSymbol::sum(vec![
            CoefficientSymbol::constant(2.0),
            CoefficientSymbol::sum(vec![CoefficientSymbol::constant(3.0), CoefficientSymbol::sin_sqrt()]),
        ]);
        let s = a.simplify(&g);
        assert_eq!(
            s,
            CoefficientSymbol::sum(vec![CoefficientSymbol::constant(5.0), CoefficientSymbol::sin_sqrt()])
                .simplify(&g)
        );
        let z = CoefficientSymbol::product(vec![CoefficientSymbol::constant(0.0), CoefficientSymbol::sin_sqrt()]);
        assert_eq!(z.simplify(&g), CoefficientSymbol::constant(0.0));
        let sc = CoefficientSymbol::product(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::sin_sqrt()]);
        assert_eq!(sc.simplify(&g), CoefficientSymbol::sin_sqrt().scaled(2.0));
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{"kind":"sum","children":[
            {"kind":"constant","value":2},
            {"kind":"slowly_oscillating","generator":{"name":"sin_sqrt"}},
            {"kind":"product","children":[
                {"kind":"periodic","period":[2],"values":[1,[0,-1]]},
                {"kind":"translate","by":[3],"child":{"kind":"slowly_oscillating","generator":{"name":"arctan","scale":2}}}
            ]},
            {"kind":"vanishing","function":{"support":[{"element":[0],"value":10}]}},
            {"kind":"vanishing","function":{"exp_decay":{"amplitude":1,"rate":0.5}}}
        ]}"#;
        let a: CoefficientSymbol = serde_json::from_str(src).unwrap();
        a.validate(&z1()).unwrap();
        let back: CoefficientSymbol = serde_json::from_str(&a.key()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn validation_errors() {
        let g = z1();
        assert!(CoefficientSymbol::periodic(vec![2], vec![re(1.0); 3]).validate(&g).is_err());
        assert!(CoefficientSymbol::arctan(0.0).validate(&g).is_err());
        assert!(CoefficientSymbol::so(SoGenerator::SinSqrt, 1).validate(&g).is_err());
        let g2 = GroupSpec::zn(2).unwrap();
        assert!(CoefficientSymbol::arctan(1.0).validate(&g2).is_err());
        assert!(CoefficientSymbol::sum(vec![]).validate(&g).is_err());
    }

    #[test]
    fn catalog_leaves_oscillate_slowly() {
        let g = z1();
        let radii = [100, 10_000, 1_000_000, 100_000_000];
        for a in [
            CoefficientSymbol::sin_sqrt(),
            CoefficientSymbol::so(SoGenerator::CosSqrt, 0),
            CoefficientSymbol::arctan(3.0),
        ] {
            let prof = oscillation_profile(&a, &g, &radii, 16);
            assert!(prof.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{prof:?}");
            assert!(*prof.last().unwrap() < 1e-4, "{prof:?}");
        }
        let g2 = GroupSpec::zn(2).unwrap();
        let prof = oscillation_profile(&CoefficientSymbol::sin_sqrt(), &g2, &radii, 16);
        assert!(*prof.last().unwrap() < 1e-4);
        // A periodic function fails the test.
        let p = CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(-1.0)]);
        assert!(oscillation_profile(&p, &g, &radii, 4).iter().all(|&v| v == 2.0));
    }

    #[test]
    fn phase_lipschitz_product_rule() {
        let a = CoefficientSymbol::product(vec![
            CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(-3.0)]),
            CoefficientSymbol::sum(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::sin_sqrt()]),
        ]);
        assert_eq!(a.phase_lipschitz(), 3.0);
        assert_eq!(a.sup_bound(), 9.0);
    }
}
