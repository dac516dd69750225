//! Decay norms and truncated energy/dissipation functionals.
//!
//! The decay pair is
//! E_β(t) = e^{βt}(Σ_{b≤2} ‖∂_t^b q‖²_{H^{4−2b}} + Σ_{b≤1} ‖∂_t^b v‖²_{H^{3−2b}}),
//! D(t) = Σ_{b≤2} ‖∂_t^b q‖²_{H^{5−2b}}, β = 2λ₁ − η,
//! with every Sobolev norm taken in the spectral surrogate sense.
//!
//! The energy/dissipation pair mirrors the full-order functionals but is
//! truncated to tangential order `max_tangential` (default 4) and time order
//! `max_time` (default 1): μ-weighted tangential derivatives near the
//! boundary, Cartesian multi-indices weighted by 1−μ near the center, and
//! boundary height terms weighted by (−∂_N q)^{1/2} R J⁻¹.

use crate::eigen::EigenBasis;
use crate::field::{ScalarField, VectorField};
use crate::operators::DiskOps;
use std::sync::Arc;

/// C^∞ cutoff: 0 on r ≤ 1/2, 1 on r ≥ 3/4, exp-based partition in between.
pub fn cutoff_mu(r: f64) -> f64 {
    let t = (r - 0.5) / 0.25;
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let g = |s: f64| (-1.0 / s).exp();
        g(t) / (g(t) + g(1.0 - t))
    }
}

pub fn cutoff_field(ops: &DiskOps) -> ScalarField {
    ScalarField::from_fn(ops.grid.clone(), |r, _| cutoff_mu(r))
}

/// Everything the energy assembly consumes; time-derivative entries are
/// optional and their absence is flagged in the output.
pub struct EnergyInputs<'a> {
    pub q: &'a ScalarField,
    pub v: &'a VectorField,
    pub psi: &'a VectorField,
    pub h: &'a [f64],
    pub q_t: &'a ScalarField,
    pub psi_t: &'a VectorField,
    pub h_t: &'a [f64],
    pub v_t: Option<&'a VectorField>,
    pub q_tt: Option<&'a ScalarField>,
    pub psi_tt: Option<&'a VectorField>,
    pub h_tt: Option<&'a [f64]>,
    /// ∂_N q per θ node.
    pub flux: &'a [f64],
    /// R J⁻¹ per θ node.
    pub r_over_j: &'a [f64],
}

#[derive(Debug, Clone, Copy)]
pub struct EnergyPair {
    pub energy: f64,
    pub dissipation: f64,
    /// Boundary height terms were skipped because the flux weight −∂_N q was
    /// not positive everywhere.
    pub weight_skipped: bool,
    /// Some time-differenced entries were unavailable and omitted.
    pub omitted_time_terms: bool,
}

/// Decay norms (E_β, D) from spectral-surrogate Sobolev norms.
pub struct DecayNorms {
    pub e_beta: f64,
    pub d_low: f64,
    pub omitted_time_terms: bool,
    /// ‖∂_t^l q‖_s entries as (l, s, value).
    pub norm_table: Vec<(u32, f64, f64)>,
}

pub fn decay_norms(
    basis: &EigenBasis,
    t: f64,
    eta: f64,
    q: &ScalarField,
    q_t: &ScalarField,
    q_tt: Option<&ScalarField>,
    v: &VectorField,
    v_t: Option<&VectorField>,
) -> crate::error::Result<DecayNorms> {
    let lambda1 = basis.lambda1();
    let beta = 2.0 * lambda1 - eta;

    let cq = basis.project(q)?;
    let cqt = basis.project(q_t)?;
    let cqtt = match q_tt {
        Some(f) => Some(basis.project(f)?),
        None => None,
    };
    let norm = |c: &[f64], s: f64| basis.sobolev_norm_of_coeffs(c, s);

    let mut table = vec![
        (0u32, 0.0, norm(&cq, 0.0)),
        (0, 3.0, norm(&cq, 3.0)),
        (0, 4.0, norm(&cq, 4.0)),
        (0, 5.0, norm(&cq, 5.0)),
        (1, 1.0, norm(&cqt, 1.0)),
        (1, 2.0, norm(&cqt, 2.0)),
        (1, 3.0, norm(&cqt, 3.0)),
    ];
    if let Some(c) = &cqtt {
        table.push((2, 0.0, norm(c, 0.0)));
        table.push((2, 1.0, norm(c, 1.0)));
    }

    let vector_norm_sq = |f: &VectorField, s: f64| -> crate::error::Result<f64> {
        let gx = ScalarField {
            grid: f.grid.clone(),
            data: f.x.clone(),
        };
        let gy = ScalarField {
            grid: f.grid.clone(),
            data: f.y.clone(),
        };
        let nx = basis.sobolev_norm(&gx, s)?;
        let ny = basis.sobolev_norm(&gy, s)?;
        Ok(nx * nx + ny * ny)
    };

    let mut omitted = false;
    let mut sum = norm(&cq, 4.0).powi(2) + norm(&cqt, 2.0).powi(2);
    match &cqtt {
        Some(c) => sum += norm(c, 0.0).powi(2),
        None => omitted = true,
    }
    sum += vector_norm_sq(v, 3.0)?;
    match v_t {
        Some(f) => sum += vector_norm_sq(f, 1.0)?,
        None => omitted = true,
    }
    let e_beta = (beta * t).exp() * sum;

    let mut d = norm(&cq, 5.0).powi(2) + norm(&cqt, 3.0).powi(2);
    if let Some(c) = &cqtt {
        d += norm(c, 1.0).powi(2);
    }

    Ok(DecayNorms {
        e_beta,
        d_low: d,
        omitted_time_terms: omitted,
        norm_table: table,
    })
}

/// Table of Cartesian derivatives ∂_x^a ∂_y^b f for a + b <= max_order,
/// indexed [a][b], built by incremental gradient application.
fn cartesian_table(ops: &DiskOps, f: &ScalarField, max_order: usize) -> Vec<Vec<ScalarField>> {
    let mut table: Vec<Vec<ScalarField>> = vec![Vec::new(); max_order + 1];
    table[0].push(f.clone());
    // column a = 0: successive y-derivatives
    for b in 1..=max_order {
        let prev = table[b - 1][0].clone();
        let g = ops.d_y(&prev);
        table[b].insert(0, g);
    }
    // rows: x-derivatives of each ∂_y^b f
    // layout: table[b][a] = ∂_x^a ∂_y^b f with a + b <= max_order
    for b in 0..=max_order {
        for a in 1..=(max_order - b) {
            let prev = table[b][a - 1].clone();
            let g = ops.d_x(&prev);
            table[b].push(g);
        }
    }
    table
}

fn weighted_l2_sq(ops: &DiskOps, weight: &ScalarField, f: &ScalarField) -> f64 {
    let grid = &ops.grid;
    let mut acc = 0.0;
    for i in 0..grid.n_r {
        let mut ring = 0.0;
        for j in 0..grid.n_theta {
            let k = grid.idx(i, j);
            ring += weight.data[k] * f.data[k] * f.data[k];
        }
        acc += grid.r_weight[i] * ring;
    }
    acc * grid.d_theta()
}

/// q-combo field ∂̄^a ∂_t^b q + ∂̄^a ∂_t^b Ψ · v for the tangential sums;
/// pass the already time-differentiated q and Ψ.
fn combo_tangential(
    ops: &DiskOps,
    q: &ScalarField,
    psi: &VectorField,
    v: &VectorField,
    a: usize,
) -> ScalarField {
    let qa = ops.d_theta_n(q, a);
    let px = ops.d_theta_n(
        &ScalarField {
            grid: psi.grid.clone(),
            data: psi.x.clone(),
        },
        a,
    );
    let py = ops.d_theta_n(
        &ScalarField {
            grid: psi.grid.clone(),
            data: psi.y.clone(),
        },
        a,
    );
    let mut out = qa;
    for k in 0..out.data.len() {
        out.data[k] += px.data[k] * v.x[k] + py.data[k] * v.y[k];
    }
    out
}

/// Truncated energy/dissipation pair at tangential order `max_tangential`
/// and time order `max_time`.
pub fn truncated_energy(
    ops: &Arc<DiskOps>,
    mu: &ScalarField,
    inputs: &EnergyInputs<'_>,
    max_tangential: usize,
    max_time: usize,
) -> EnergyPair {
    let grid = &ops.grid;
    let m = max_tangential;
    let dth = grid.d_theta();
    let mut omitted = false;

    let one_minus_mu = ScalarField {
        grid: grid.clone(),
        data: mu.data.iter().map(|v| 1.0 - v).collect(),
    };

    // flux weight for the boundary h terms
    let chi_ok = inputs.flux.iter().all(|&f| -f > 0.0);
    let boundary_term = |ring: &[f64], order: usize| -> f64 {
        let d = ops.d_theta_ring_n(ring, order);
        let mut acc = 0.0;
        for j in 0..grid.n_theta {
            let w = -inputs.flux[j] * inputs.r_over_j[j] * inputs.r_over_j[j];
            acc += w * d[j] * d[j];
        }
        acc * dth
    };

    let scalar = |data: &Vec<f64>| ScalarField {
        grid: grid.clone(),
        data: data.clone(),
    };

    // time levels of the basic fields
    let v_levels: Vec<Option<(&Vec<f64>, &Vec<f64>)>> = vec![
        Some((&inputs.v.x, &inputs.v.y)),
        inputs.v_t.map(|f| (&f.x, &f.y)),
    ];
    let q_levels: Vec<Option<&ScalarField>> = vec![Some(inputs.q), Some(inputs.q_t)];
    let qt_levels: Vec<Option<&ScalarField>> = vec![Some(inputs.q_t), inputs.q_tt];
    let psi_levels: Vec<Option<&VectorField>> = vec![Some(inputs.psi), Some(inputs.psi_t)];
    let psit_levels: Vec<Option<&VectorField>> = vec![Some(inputs.psi_t), inputs.psi_tt];

    let mut energy = 0.0;
    let mut dissipation = 0.0;
    let mut weight_skipped = false;

    // --- tangential μ-weighted velocity sums ---
    for b in 0..=max_time.min(1) {
        let Some((vx, vy)) = v_levels[b] else {
            omitted = true;
            continue;
        };
        let fx = scalar(vx);
        let fy = scalar(vy);
        // energy: a + 2b <= m − 1; dissipation: a + 2b <= m
        for a in 0..=m.saturating_sub(2 * b) {
            let dax = ops.d_theta_n(&fx, a);
            let day = ops.d_theta_n(&fy, a);
            let val = weighted_l2_sq(ops, mu, &dax) + weighted_l2_sq(ops, mu, &day);
            if a + 2 * b <= m - 1 {
                energy += 0.5 * val;
            }
            if a + 2 * b <= m {
                dissipation += val;
            }
        }
    }

    // --- boundary height terms ---
    if chi_ok {
        let h_levels: Vec<Option<&[f64]>> = vec![Some(inputs.h), Some(inputs.h_t)];
        let ht_levels: Vec<Option<&[f64]>> = vec![Some(inputs.h_t), inputs.h_tt];
        for b in 0..=max_time.min(1) {
            if 2 * b <= m {
                if let Some(ring) = h_levels[b] {
                    energy += 0.5 * boundary_term(ring, m - 2 * b);
                } else {
                    omitted = true;
                }
            }
            if 2 * b <= m - 1 {
                match ht_levels[b] {
                    Some(ring) => dissipation += boundary_term(ring, (m - 1) - 2 * b),
                    None => omitted = true,
                }
            }
        }
    } else {
        weight_skipped = true;
    }

    // --- tangential μ-weighted q-combo sums ---
    for b in 0..=max_time.min(1) {
        // energy: (q, Ψ) levels, a + 2b <= m
        if let (Some(q), Some(psi)) = (q_levels[b], psi_levels[b]) {
            for a in 0..=(m - 2 * b) {
                let f = combo_tangential(ops, q, psi, inputs.v, a);
                energy += 0.5 * weighted_l2_sq(ops, mu, &f);
            }
        } else {
            omitted = true;
        }
        // dissipation: (q_t, Ψ_t) levels, a + 2b <= m − 1
        if 2 * b <= m - 1 {
            if let (Some(qt), Some(psit)) = (qt_levels[b], psit_levels[b]) {
                for a in 0..=((m - 1) - 2 * b) {
                    let f = combo_tangential(ops, qt, psit, inputs.v, a);
                    dissipation += weighted_l2_sq(ops, mu, &f);
                }
            } else {
                omitted = true;
            }
        }
    }

    // --- interior Cartesian multi-index sums ---
    for b in 0..=max_time.min(1) {
        if let Some((vx, vy)) = v_levels[b] {
            let tx = cartesian_table(ops, &scalar(vx), m.saturating_sub(2 * b));
            let ty = cartesian_table(ops, &scalar(vy), m.saturating_sub(2 * b));
            for (bb, row) in tx.iter().enumerate() {
                for (aa, f) in row.iter().enumerate() {
                    let order = aa + bb;
                    let val =
                        weighted_l2_sq(ops, &one_minus_mu, f) + weighted_l2_sq(ops, &one_minus_mu, &ty[bb][aa]);
                    if order + 2 * b <= m - 1 {
                        energy += val;
                    }
                    if order + 2 * b <= m {
                        dissipation += val;
                    }
                }
            }
        }
        // interior q-combo: ∂^α q + ∂^α Ψ · v, returned as (|α|, field)
        let interior_combo =
            |q: &ScalarField, psi: &VectorField, cap: usize| -> Vec<(usize, ScalarField)> {
                let tq = cartesian_table(ops, q, cap);
                let tpx = cartesian_table(ops, &scalar(&psi.x), cap);
                let tpy = cartesian_table(ops, &scalar(&psi.y), cap);
                let mut out = Vec::new();
                for (bb, row) in tq.iter().enumerate() {
                    for (aa, f) in row.iter().enumerate() {
                        let mut combo = f.clone();
                        for k in 0..combo.data.len() {
                            combo.data[k] += tpx[bb][aa].data[k] * inputs.v.x[k]
                                + tpy[bb][aa].data[k] * inputs.v.y[k];
                        }
                        out.push((aa + bb, combo));
                    }
                }
                out
            };
        if 2 * b <= m {
            if let (Some(q), Some(psi)) = (q_levels[b], psi_levels[b]) {
                for (order, combo) in interior_combo(q, psi, m - 2 * b) {
                    if order + 2 * b <= m {
                        energy += 0.5 * weighted_l2_sq(ops, &one_minus_mu, &combo);
                    }
                }
            }
        }
        if 2 * b <= m - 1 {
            if let (Some(qt), Some(psit)) = (qt_levels[b], psit_levels[b]) {
                for (order, combo) in interior_combo(qt, psit, (m - 1) - 2 * b) {
                    if order + 2 * b <= m - 1 {
                        dissipation += weighted_l2_sq(ops, &one_minus_mu, &combo);
                    }
                }
            }
        }
    }

    EnergyPair {
        energy,
        dissipation,
        weight_skipped,
        omitted_time_terms: omitted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DiskGrid;

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff_mu(0.3), 0.0);
        assert_eq!(cutoff_mu(0.5), 0.0);
        assert_eq!(cutoff_mu(0.75), 1.0);
        assert_eq!(cutoff_mu(0.9), 1.0);
        let mid = cutoff_mu(0.625);
        assert!((mid - 0.5).abs() < 1e-12, "partition symmetric at center");
        assert!(cutoff_mu(0.6) > 0.0 && cutoff_mu(0.6) < 1.0);
        // monotone on the blend
        let mut prev = 0.0;
        for i in 0..=20 {
            let v = cutoff_mu(0.5 + 0.25 * i as f64 / 20.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn cartesian_table_matches_direct() {
        let grid = DiskGrid::graded(32, 48).unwrap();
        let ops = DiskOps::new(grid.clone());
        let f = ScalarField::from_fn(grid.clone(), |r, th| {
            let (x, y) = (r * th.cos(), r * th.sin());
            x * x + 0.3 * x * y
        });
        let table = cartesian_table(&ops, &f, 2);
        // table[b][a] = ∂_x^a ∂_y^b f
        let fx = ops.cartesian_derivative(&f, 1, 0);
        let fxy = ops.cartesian_derivative(&f, 1, 1);
        let mid = grid.idx(grid.n_r / 2, 3);
        assert!((table[0][1].data[mid] - fx.data[mid]).abs() < 1e-12);
        assert!((table[1][1].data[mid] - fxy.data[mid]).abs() < 1e-9);
    }
}
