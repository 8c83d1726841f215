//! Cross-module invariants, property-tested over random channels.

use num_complex::Complex64;
use proptest::prelude::*;

use fibercap::dark::{
    apply_with_dark_counts, click_conditioned, dephasing_with_dc_bounds, effective_channel,
    effective_transmissivity, DarkCountParams,
};
use fibercap::density::DensityMatrix;
use fibercap::{capacity_edh, capacity_edp_upper, ErasurePauliChannel, PauliDistribution};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dist_strategy() -> impl Strategy<Value = PauliDistribution> {
    [1e-9..1.0f64, 1e-9..1.0f64, 1e-9..1.0f64, 1e-9..1.0f64].prop_map(|w| {
        let s: f64 = w.iter().sum();
        PauliDistribution::new([w[0] / s, w[1] / s, w[2] / s, w[3] / s]).unwrap()
    })
}

fn qubit_strategy() -> impl Strategy<Value = DensityMatrix> {
    [
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        0.0..1.0f64,
    ]
    .prop_filter_map("degenerate amplitudes", |v| {
        // Mixture of two pure states; always a valid qubit state.
        let a = [c(v[0], v[1]), c(v[2], v[3])];
        let b = [c(v[4], v[5]), c(v[6], v[7])];
        let (na, nb) = (
            a[0].norm_sqr() + a[1].norm_sqr(),
            b[0].norm_sqr() + b[1].norm_sqr(),
        );
        if na < 1e-6 || nb < 1e-6 {
            return None;
        }
        let rho_a = DensityMatrix::from_pure(&a).unwrap();
        let rho_b = DensityMatrix::from_pure(&b).unwrap();
        let mut m = rho_a.as_matrix().scale_re(v[8]);
        m.add_assign_scaled(rho_b.as_matrix(), 1.0 - v[8]);
        Some(DensityMatrix::new(m).unwrap())
    })
}

proptest! {
    #[test]
    fn pauli_application_preserves_state_validity(
        dist in dist_strategy(),
        rho in qubit_strategy(),
    ) {
        // DensityMatrix::new inside apply re-validates Hermiticity, trace
        // and positivity.
        let out = dist.apply(&rho).unwrap();
        prop_assert_eq!(out.dim(), 2);
    }

    #[test]
    fn choi_spectrum_is_the_distribution(dist in dist_strategy()) {
        let mut evals = dist.choi_state().eigenvalues();
        let mut want = dist.probs().to_vec();
        evals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, w) in evals.iter().zip(want) {
            prop_assert!((e - w).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_is_permutation_invariant(dist in dist_strategy(), perm in 0usize..24) {
        let p = dist.probs();
        let mut idx = [0usize, 1, 2, 3];
        // perm-th lexicographic permutation of the indices.
        let mut k = perm;
        let mut pool: Vec<usize> = (0..4).collect();
        for i in 0..4 {
            let f = [6, 2, 1, 1][i];
            idx[i] = pool.remove(k / f);
            k %= f;
        }
        let shuffled = PauliDistribution::new([p[idx[0]], p[idx[1]], p[idx[2]], p[idx[3]]]).unwrap();
        prop_assert!((dist.shannon_entropy() - shuffled.shannon_entropy()).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_ordered_and_unit_box(eta in 0.0..1.0f64, dist in dist_strategy()) {
        let b = ErasurePauliChannel::new(eta, dist).unwrap().capacity_bounds();
        prop_assert!(0.0 <= b.lower);
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.upper <= 1.0);
        prop_assert_eq!(b.exact, (b.upper - b.lower).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_dominates_hashing_when_pmax_large(
        p_max in 0.5..1.0f64,
        rest in [1e-9..1.0f64, 1e-9..1.0f64, 1e-9..1.0f64],
        slot in 0usize..4,
    ) {
        let s: f64 = rest.iter().sum();
        let mut p = [0.0f64; 4];
        let mut r = rest.iter();
        for (k, pk) in p.iter_mut().enumerate() {
            *pk = if k == slot { p_max } else { (1.0 - p_max) * r.next().unwrap() / s };
        }
        let dist = PauliDistribution::new(p).unwrap();
        prop_assert!(dist.phi_upper() >= (1.0 - dist.shannon_entropy()) - 1e-12);
    }

    #[test]
    fn dark_count_reparametrization_identity(
        eta in 0.0..1.0f64,
        p_dc in 0.0..1.0f64,
        dist in dist_strategy(),
        rho in qubit_strategy(),
    ) {
        let ch = ErasurePauliChannel::new(eta, dist).unwrap();
        let dc = DarkCountParams::new(p_dc).unwrap();
        let direct = apply_with_dark_counts(&ch, dc, &rho).unwrap();
        let via_eff = effective_channel(&ch, dc).apply(&rho).unwrap();
        prop_assert!(direct.as_matrix().max_abs_diff(via_eff.as_matrix()) < 1e-12);
    }

    #[test]
    fn click_conditioning_is_the_effective_pauli_channel(
        eta in 0.0..1.0f64,
        p_dc in 1e-6..1.0f64,
        dist in dist_strategy(),
        rho in qubit_strategy(),
    ) {
        let ch = ErasurePauliChannel::new(eta, dist).unwrap();
        let dc = DarkCountParams::new(p_dc).unwrap();
        let cond = click_conditioned(&ch, dc, &rho).unwrap();
        let via_eff = effective_channel(&ch, dc).dist().apply(&rho).unwrap();
        prop_assert!(cond.as_matrix().max_abs_diff(via_eff.as_matrix()) < 1e-12);
    }

    #[test]
    fn transmissivity_forms_agree(eta in 0.0..1.0f64, p_dc in 0.0..1.0f64) {
        let a = effective_transmissivity(eta, p_dc);
        let b = 1.0 - (1.0 - eta) * (1.0 - p_dc);
        // Both forms live on the unit scale, so 1e-15 relative means 1e-15
        // absolute; the subtractive form rounds at ulp(1) regardless of how
        // small the result is.
        prop_assert!((a - b).abs() <= 1e-15);
    }

    #[test]
    fn specialization_consistency(eta in 0.0..1.0f64, p in 0.0..1.0f64) {
        let iso = ErasurePauliChannel::new(eta, PauliDistribution::isotropic(p).unwrap())
            .unwrap()
            .capacity_bounds();
        prop_assert!((capacity_edp_upper(eta, p).unwrap() - iso.upper).abs() < 1e-12);

        let p_deph = 0.5 * p;
        let deph = ErasurePauliChannel::new(eta, PauliDistribution::dephasing(p_deph).unwrap())
            .unwrap()
            .capacity_bounds();
        let exact = capacity_edh(eta, p_deph).unwrap();
        prop_assert!((deph.lower - exact).abs() < 1e-12);
        prop_assert!((deph.upper - exact).abs() < 1e-12);
    }

    #[test]
    fn dark_counts_never_raise_the_upper_bound(
        eta in 0.0..1.0f64,
        p in 0.0..0.5f64,
        p_dc_lo in 0.0..1.0f64,
        p_dc_hi in 0.0..1.0f64,
    ) {
        let (lo, hi) = if p_dc_lo <= p_dc_hi { (p_dc_lo, p_dc_hi) } else { (p_dc_hi, p_dc_lo) };
        let u_lo = dephasing_with_dc_bounds(eta, p, lo).unwrap().upper;
        let u_hi = dephasing_with_dc_bounds(eta, p, hi).unwrap().upper;
        prop_assert!(u_hi <= u_lo + 1e-12);
    }
}

// The zero-capacity predicate must coincide with the vanishing of the upper
// bound over a dense parameter grid. Points within 1e-3 of p_max = 1/2 are
// excluded: there the bound is positive analytically but can round to
// something below any fixed test threshold.
#[test]
fn threshold_consistency_on_grid() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0u32;
    while checked < 10_000 {
        let eta: f64 = if rng.gen_bool(0.1) {
            0.0
        } else {
            rng.gen_range(0.05..1.0)
        };
        let w: [f64; 4] = std::array::from_fn(|_| -rng.gen::<f64>().max(1e-12).ln());
        let s: f64 = w.iter().sum();
        let dist = PauliDistribution::new([w[0] / s, w[1] / s, w[2] / s, w[3] / s]).unwrap();
        if (dist.p_max() - 0.5).abs() < 1e-3 {
            continue;
        }
        checked += 1;
        let ch = ErasurePauliChannel::new(eta, dist).unwrap();
        assert_eq!(
            ch.is_zero_capacity(),
            ch.capacity_bounds().upper < 1e-12,
            "eta={eta} dist={:?}",
            dist.probs()
        );
    }
}

// Exactness of the flag structure for every channel and input.
#[test]
fn flag_consistency_sampled() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
    for _ in 0..1000 {
        let eta: f64 = rng.gen();
        let w: [f64; 4] = std::array::from_fn(|_| -rng.gen::<f64>().max(1e-12).ln());
        let s: f64 = w.iter().sum();
        let dist = PauliDistribution::new([w[0] / s, w[1] / s, w[2] / s, w[3] / s]).unwrap();
        let ch = ErasurePauliChannel::new(eta, dist).unwrap();
        let rho = DensityMatrix::from_pure(&[
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
        ])
        .unwrap();
        let out = ch.apply(&rho).unwrap();
        assert_eq!(out.entry(2, 2), c(1.0 - eta, 0.0));
        for k in 0..2 {
            assert_eq!(out.entry(k, 2), c(0.0, 0.0));
            assert_eq!(out.entry(2, k), c(0.0, 0.0));
        }
    }
}
