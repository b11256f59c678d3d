//! Quadrature rules on the master triangle and its edges.
//!
//! Volume rules come from three sources, picked by requested strength:
//! symmetric tabulated rules (compact, strength <= 8), fully symmetric
//! simplex rules with closed-form weights (strength <= 19), and a collapsed
//! tensor Gauss rule symmetrized over the triangle group as the fallback for
//! anything stronger. All are exact for total degree <= strength and their
//! weights sum to the master triangle area 2.

use super::jacobi::{gauss_legendre, jacobi_gq};

/// Cubature rule on the master triangle.
#[derive(Debug, Clone)]
pub struct TriRule {
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub strength: usize,
}

impl TriRule {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.len()).map(move |i| (self.r[i], self.s[i], self.w[i]))
    }
}

/// Gauss rule on [-1,1] used for edge integrals.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

/// Edge rule with `npts` points, exact through degree 2*npts-1.
pub fn edge_rule(npts: usize) -> EdgeRule {
    let (x, w) = gauss_legendre(npts);
    EdgeRule { x, w }
}

fn bary_to_rs(l1: f64, l2: f64, l3: f64) -> (f64, f64) {
    (-l1 + l2 - l3, -l1 - l2 + l3)
}

struct RuleBuilder {
    r: Vec<f64>,
    s: Vec<f64>,
    w: Vec<f64>,
}

impl RuleBuilder {
    fn new() -> Self {
        RuleBuilder { r: vec![], s: vec![], w: vec![] }
    }

    fn push_bary(&mut self, l: [f64; 3], w: f64) {
        let (r, s) = bary_to_rs(l[0], l[1], l[2]);
        self.r.push(r);
        self.s.push(s);
        self.w.push(w);
    }

    /// Centroid orbit (1 point). Weight given in unit-area normalization.
    fn s3(&mut self, w: f64) {
        self.push_bary([1.0 / 3.0; 3], 2.0 * w);
    }

    /// Three-point orbit: permutations of (a, a, 1-2a).
    fn s21(&mut self, a: f64, w: f64) {
        let b = 1.0 - 2.0 * a;
        self.push_bary([a, a, b], 2.0 * w);
        self.push_bary([a, b, a], 2.0 * w);
        self.push_bary([b, a, a], 2.0 * w);
    }

    /// Six-point orbit: permutations of (a, b, 1-a-b).
    fn s111(&mut self, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        for l in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.push_bary(l, 2.0 * w);
        }
    }

    fn build(self, strength: usize) -> TriRule {
        TriRule { r: self.r, s: self.s, w: self.w, strength }
    }
}

/// Symmetric tabulated rules, strength <= 8 (weights in unit-area
/// normalization inside; scaled to sum to 2 on output).
fn tabulated_rule(strength: usize) -> Option<TriRule> {
    let mut b = RuleBuilder::new();
    match strength {
        0 | 1 => b.s3(1.0),
        2 => b.s21(1.0 / 6.0, 1.0 / 3.0),
        3 | 4 => {
            b.s21(0.445948490915965, 0.223381589678011);
            b.s21(0.091576213509771, 0.109951743655322);
        }
        5 => {
            b.s3(0.225);
            b.s21(0.470142064105115, 0.132394152788506);
            b.s21(0.101286507323456, 0.125939180544827);
        }
        6 => {
            b.s21(0.249286745170910, 0.116786275726379);
            b.s21(0.063089014491502, 0.050844906370207);
            b.s111(0.310352451033785, 0.053145049844816, 0.082851075618374);
        }
        7 | 8 => {
            b.s3(0.144_315_607_677_780_8);
            b.s21(0.459_292_588_292_719, 0.095_091_634_267_281_65);
            b.s21(0.170_569_307_751_761_5, 0.103_217_370_534_712_8);
            b.s21(0.050_547_228_317_035_95, 0.032_458_497_623_203_87);
            b.s111(0.263_112_829_634_661_8, 0.008_394_777_409_961_47, 0.027_230_314_174_437_4);
        }
        _ => return None,
    }
    Some(b.build(strength))
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Fully symmetric simplex rule with closed-form (mixed-sign) weights,
/// exact for odd degree d = 2s+1. Grundmann-Moller construction on the
/// 2-simplex; weights rescaled so they sum to the master area.
fn grundmann_moller(s: usize) -> TriRule {
    let n = 2usize;
    let d = 2 * s + 1;
    let mut b = RuleBuilder::new();
    for i in 0..=s {
        let denom = (d + n - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * 2f64.powi(-2 * (s as i32)) * denom.powi(d as i32)
            / (factorial(i) * factorial(d + n - i));
        let m = s - i;
        for b0 in 0..=m {
            for b1 in 0..=(m - b0) {
                let b2 = m - b0 - b1;
                let l = [
                    (2 * b0 + 1) as f64 / denom,
                    (2 * b1 + 1) as f64 / denom,
                    (2 * b2 + 1) as f64 / denom,
                ];
                b.push_bary(l, w);
            }
        }
    }
    let mut rule = b.build(d);
    let total: f64 = rule.w.iter().sum();
    let scale = 2.0 / total;
    for w in &mut rule.w {
        *w *= scale;
    }
    rule
}

/// Collapsed (Duffy) tensor Gauss rule on the master triangle, exact for
/// total degree <= strength, all weights positive. Not symmetric; used as
/// the fallback seed and as an independent reference rule in tests.
pub fn collapsed_rule(strength: usize) -> TriRule {
    let m = strength / 2 + 2;
    let (xa, wa) = gauss_legendre(m);
    let (xb, wb) = jacobi_gq(1, 0, m - 1);
    let mut r = Vec::with_capacity(m * m);
    let mut s = Vec::with_capacity(m * m);
    let mut w = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let a = xa[i];
            let b = xb[j];
            r.push(0.5 * (1.0 + a) * (1.0 - b) - 1.0);
            s.push(b);
            w.push(0.5 * wa[i] * wb[j]);
        }
    }
    TriRule { r, s, w, strength }
}

/// Average a rule over the 6-element symmetry group of the triangle.
fn symmetrize(rule: TriRule) -> TriRule {
    let mut b = RuleBuilder::new();
    for (r, s, w) in rule.iter() {
        // barycentric coordinates of the point
        let l1 = -(r + s) / 2.0;
        let l2 = (1.0 + r) / 2.0;
        let l3 = (1.0 + s) / 2.0;
        for perm in [
            [l1, l2, l3],
            [l1, l3, l2],
            [l2, l1, l3],
            [l2, l3, l1],
            [l3, l1, l2],
            [l3, l2, l1],
        ] {
            b.push_bary(perm, w / 6.0);
        }
    }
    b.build(rule.strength)
}

/// Cubature rule of at least the requested strength.
pub fn tri_rule(strength: usize) -> TriRule {
    if let Some(rule) = tabulated_rule(strength) {
        return rule;
    }
    if strength <= 19 {
        // round up to the next odd degree d = 2s+1
        let s = if strength % 2 == 1 { (strength - 1) / 2 } else { strength / 2 };
        return grundmann_moller(s);
    }
    symmetrize(collapsed_rule(strength))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact integral of r^a s^b over the master triangle, via the iterated
    /// integral: (-1)^(a+1)/(a+1) * (I(a+b+1) - I(b)) with I(p) the monomial
    /// integral over [-1,1]. Closed form, no cancellation.
    fn exact_monomial(a: usize, b: usize) -> f64 {
        let i1d = |p: usize| if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
        let sign = if (a + 1) % 2 == 0 { 1.0 } else { -1.0 };
        sign / (a as f64 + 1.0) * (i1d(a + b + 1) - i1d(b))
    }

    fn check_exactness(rule: &TriRule, strength: usize, tol: f64) {
        for a in 0..=strength {
            for b in 0..=(strength - a) {
                let num: f64 = rule
                    .iter()
                    .map(|(r, s, w)| w * r.powi(a as i32) * s.powi(b as i32))
                    .sum();
                let exact = exact_monomial(a, b);
                assert!(
                    (num - exact).abs() < tol,
                    "strength {strength}, monomial r^{a} s^{b}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn area_and_centroid_moments() {
        let rule = tri_rule(4);
        let area: f64 = rule.w.iter().sum();
        assert!((area - 2.0).abs() < 1e-13);
        let mr: f64 = rule.iter().map(|(r, _, w)| w * r).sum();
        assert!((mr - (-2.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn tabulated_rules_exact() {
        for strength in 1..=8 {
            let rule = tri_rule(strength);
            check_exactness(&rule, strength, 1e-12);
        }
    }

    #[test]
    fn generated_rules_exact() {
        for strength in 9..=16 {
            let rule = tri_rule(strength);
            check_exactness(&rule, strength, 2e-12);
        }
    }

    #[test]
    fn collapsed_rule_exact() {
        for strength in [4, 9, 14, 20] {
            let rule = collapsed_rule(strength);
            check_exactness(&rule, strength, 1e-12);
            assert!(rule.w.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn symmetrized_fallback_exact_and_symmetric() {
        let rule = symmetrize(collapsed_rule(21));
        check_exactness(&rule, 21, 5e-12);
    }

    #[test]
    fn rules_symmetric_as_multisets() {
        // multiset of (sorted barycentric coords, weight) must be invariant
        for strength in [2, 5, 8, 11, 14] {
            let rule = tri_rule(strength);
            let mut keys: Vec<[i64; 4]> = rule
                .iter()
                .map(|(r, s, w)| {
                    let mut l = [-(r + s) / 2.0, (1.0 + r) / 2.0, (1.0 + s) / 2.0];
                    l.sort_by(f64::total_cmp);
                    [
                        (l[0] * 1e12).round() as i64,
                        (l[1] * 1e12).round() as i64,
                        (l[2] * 1e12).round() as i64,
                        (w * 1e12).round() as i64,
                    ]
                })
                .collect();
            keys.sort();
            // every point's orbit partner set must be present: swapping two
            // barycentric coordinates maps the rule onto itself
            let mut swapped: Vec<[i64; 4]> = rule
                .iter()
                .map(|(r, s, w)| {
                    // reflection r <-> s
                    let (r2, s2) = (s, r);
                    let mut l = [-(r2 + s2) / 2.0, (1.0 + r2) / 2.0, (1.0 + s2) / 2.0];
                    l.sort_by(f64::total_cmp);
                    [
                        (l[0] * 1e12).round() as i64,
                        (l[1] * 1e12).round() as i64,
                        (l[2] * 1e12).round() as i64,
                        (w * 1e12).round() as i64,
                    ]
                })
                .collect();
            swapped.sort();
            assert_eq!(keys, swapped, "strength {strength} not symmetric");
        }
    }

    #[test]
    fn edge_rule_exact() {
        // spec example: x^2 integrates to 2/3
        let rule = edge_rule(2);
        let v: f64 = rule.x.iter().zip(&rule.w).map(|(&x, &w)| w * x * x).sum();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        // degree 2n+1 exactness for the sizes used by the solver
        for npts in 2..=13 {
            let rule = edge_rule(npts);
            let wsum: f64 = rule.w.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            for p in 0..=(2 * npts - 1) {
                let v: f64 =
                    rule.x.iter().zip(&rule.w).map(|(&x, &w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
                assert!((v - exact).abs() < 1e-13, "npts={npts} p={p}");
            }
        }
    }
}
