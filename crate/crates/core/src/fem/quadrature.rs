//! Quadrature rules in barycentric form. Weights sum to one; multiply by the
//! cell measure to integrate.

pub struct Rule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Symmetric 4-point rule on the tetrahedron, exact for degree 2.
pub fn tet_degree2() -> Rule {
    let a = 0.585_410_196_624_968_5;
    let b = 0.138_196_601_125_010_5;
    Rule {
        points: vec![vec![a, b, b, b], vec![b, a, b, b], vec![b, b, a, b], vec![b, b, b, a]],
        weights: vec![0.25; 4],
    }
}

/// Edge-midpoint rule on the triangle, exact for degree 2.
pub fn triangle_degree2() -> Rule {
    Rule {
        points: vec![vec![0.5, 0.5, 0.0], vec![0.5, 0.0, 0.5], vec![0.0, 0.5, 0.5]],
        weights: vec![1.0 / 3.0; 3],
    }
}

/// Grundmann–Möller rule of index `s` on the `dim`-simplex, exact for degree
/// `2s + 1`. Some weights are negative for `s >= 1`.
pub fn grundmann_moller(dim: usize, s: usize) -> Rule {
    let d = 2 * s + 1;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let factorial = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
    // weights in the original normalization integrate over a simplex of
    // volume 1/dim!; rescale so they sum to one
    let vol = 1.0 / factorial(dim);
    for i in 0..=s {
        let denom = (d + dim - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * 2f64.powi(-(2 * s as i32)) * denom.powi(d as i32)
            / (factorial(i) * factorial(d + dim - i))
            / vol;
        let mut beta = vec![0usize; dim + 1];
        compositions(s - i, 0, &mut beta, &mut |b| {
            points.push(b.iter().map(|&bj| (2 * bj + 1) as f64 / denom).collect());
            weights.push(w);
        });
    }
    Rule { points, weights }
}

fn compositions(rem: usize, pos: usize, beta: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if pos == beta.len() - 1 {
        beta[pos] = rem;
        emit(beta);
        return;
    }
    for v in (0..=rem).rev() {
        beta[pos] = v;
        compositions(rem - v, pos + 1, beta, emit);
    }
}

/// Three-point Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre3_unit() -> ([f64; 3], [f64; 3]) {
    let r = (0.6f64).sqrt() / 2.0;
    ([0.5 - r, 0.5, 0.5 + r], [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    // integral of prod x_i^a_i over the unit simplex = prod a_i! / (dim + sum a)!
    fn monomial_exact(exps: &[u32]) -> f64 {
        let f = |m: u32| (1..=m).map(|v| v as f64).product::<f64>();
        let total: u32 = exps.iter().sum();
        exps.iter().map(|&e| f(e)).product::<f64>() / f(exps.len() as u32 + total)
    }

    fn check(rule: &Rule, dim: usize, degree: u32) {
        let vol = 1.0 / (1..=dim).map(|v| v as f64).product::<f64>();
        let mut exps = vec![0u32; dim];
        loop {
            if exps.iter().sum::<u32>() <= degree {
                let approx: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * exps.iter().enumerate().map(|(i, &e)| p[i + 1].powi(e as i32)).product::<f64>())
                    .sum::<f64>()
                    * vol;
                let exact = monomial_exact(&exps);
                assert!((approx - exact).abs() < 1e-13, "{exps:?}: {approx} vs {exact}");
            }
            let mut i = 0;
            loop {
                if i == dim {
                    return;
                }
                exps[i] += 1;
                if exps[i] <= degree {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn fixed_rules_exact_for_degree_two() {
        check(&tet_degree2(), 3, 2);
        check(&triangle_degree2(), 2, 2);
    }

    #[test]
    fn grundmann_moller_exactness() {
        for s in 0..4 {
            let r = grundmann_moller(3, s);
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            check(&r, 3, 2 * s as u32 + 1);
            check(&grundmann_moller(2, s), 2, 2 * s as u32 + 1);
        }
    }
}
