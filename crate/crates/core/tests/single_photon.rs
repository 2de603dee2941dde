use std::f64::consts::PI;

use num_complex::Complex64 as C;
use wqed_core::single_photon::amplitudes_at_phase;
use wqed_core::*;

#[test]
fn lossy_amplitudes_match_transfer_matrix_values() {
    // δ = -0.5, k0L = π/4, Γ' = 0.1; two single-qubit transfer matrices multiplied at 40 digits.
    let p = SystemParams::new(0.1, PI / 4.0);
    let a = amplitudes(99.5, &p, Direction::FromLeft);
    let t = C::new(0.026929929173158193, 0.829515163275316);
    let r = C::new(-0.10010775881515804, 0.06060339122399424);
    assert!((a.t_k - t).norm() < 1e-13, "{}", a.t_k);
    assert!((a.r_k - r).norm() < 1e-13, "{}", a.r_k);
}

#[test]
fn perfect_transmission_window() {
    // T falls off quadratically away from the T = 1 locus through the gate point.
    let p = SystemParams::new(0.0, 0.0);
    for i in -4..=4 {
        for j in -4..=4 {
            let a = amplitudes_at_phase(-0.5 + 0.0015 * i as f64, PI / 2.0 + 0.0015 * j as f64, &p);
            assert!(a.transmission() > 0.999, "({i}, {j}): {}", a.transmission());
        }
    }
}

#[test]
fn transmission_map_regression() {
    // Lossless 13 x 17 map over δ ∈ [-3, 3], 2kL ∈ [0, 4π]; values checked point by point
    // against an independent transfer-matrix evaluation when pinned.
    let text = include_str!("data/transmission_map_13x17.csv");
    let rows: Vec<[f64; 4]> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect();
    assert_eq!(rows.len(), 13 * 17);
    let deltas: Vec<f64> = (0..13).map(|i| rows[17 * i][0]).collect();
    let phases: Vec<f64> = (0..17).map(|j| rows[j][1]).collect();
    let map = transmission_map(&deltas, &phases, &SystemParams::new(0.0, 0.0));
    for (i, row) in map.iter().enumerate() {
        for (j, pt) in row.iter().enumerate() {
            let want = rows[17 * i + j];
            assert!((pt.transmission - want[2]).abs() < 1e-12);
            let dth = (pt.phase - want[3] + PI).rem_euclid(2.0 * PI) - PI;
            assert!(dth.abs() < 1e-12, "θ at ({}, {})", want[0], want[1]);
            let a = amplitudes_at_phase(pt.delta, pt.two_kl, &SystemParams::new(0.0, 0.0));
            assert!((a.transmission() + a.reflection() - 1.0).abs() < 1e-12);
            assert!(pt.phase > -PI && pt.phase <= PI);
        }
    }
}

#[test]
fn both_sides_transmit_alike() {
    for (k, k0l, gp) in [(99.2, 0.7, 0.0), (100.4, 25.5 * PI, 0.1), (100.0, 3.0, 0.3)] {
        let p = SystemParams::new(gp, k0l);
        let l = amplitudes(k, &p, Direction::FromLeft);
        let r = amplitudes(k, &p, Direction::FromRight);
        assert!((l.t_k - r.t_k).norm() < 1e-14);
    }
}
