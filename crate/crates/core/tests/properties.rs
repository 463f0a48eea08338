//! Property tests for the crate-wide invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use sildkit::batch::histogram;
use sildkit::freq::FrequencyGrid;
use sildkit::mixed_mode::to_mixed_mode;
use sildkit::network::{PortMap, SMatrix, SingleEndedNetwork};
use sildkit::sild::{fom_sild, sild, FomConfig};
use sildkit::skew::{pn_skew, SkewDirection};
use sildkit::synth::{
    ideal_diff_channel, inject_se_delay, ChannelSpec, Line, LossModel, Side, SkewProfileSpec,
};
use sildkit::touchstone::{
    parse_touchstone, write_touchstone, DataFormat, FrequencyUnit, TouchstoneOptions,
    TouchstoneVersion,
};

fn complex_in_unit_disk() -> impl Strategy<Value = Complex64> {
    (-0.7f64..0.7, -0.7f64..0.7).prop_map(|(re, im)| Complex64::new(re, im))
}

fn arb_network(max_points: usize) -> impl Strategy<Value = SingleEndedNetwork> {
    (2usize..max_points)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(complex_in_unit_disk(), n * 16),
                1.0e6f64..1.0e9,
                1.0e8f64..5.0e9,
            )
        })
        .prop_map(|(n, vals, f0, step)| {
            let freqs: Vec<f64> = (0..n).map(|i| f0 + i as f64 * step).collect();
            let matrices: Vec<SMatrix> = (0..n)
                .map(|k| {
                    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
                    for i in 0..4 {
                        for j in 0..4 {
                            m[i][j] = vals[k * 16 + i * 4 + j];
                        }
                    }
                    m
                })
                .collect();
            SingleEndedNetwork::new(
                FrequencyGrid::new(freqs).unwrap(),
                matrices,
                PortMap::default(),
                50.0,
            )
            .unwrap()
        })
}

fn arb_options() -> impl Strategy<Value = TouchstoneOptions> {
    (
        prop_oneof![
            Just(FrequencyUnit::Hz),
            Just(FrequencyUnit::KHz),
            Just(FrequencyUnit::MHz),
            Just(FrequencyUnit::GHz)
        ],
        prop_oneof![
            Just(DataFormat::Ri),
            Just(DataFormat::Ma),
            Just(DataFormat::Db)
        ],
        prop_oneof![Just(TouchstoneVersion::V1), Just(TouchstoneVersion::V2)],
    )
        .prop_map(|(frequency_unit, data_format, version)| TouchstoneOptions {
            frequency_unit,
            data_format,
            reference_impedance: 50.0,
            version,
        })
}

fn max_entry_error(a: &SingleEndedNetwork, b: &SingleEndedNetwork) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..a.grid().len() {
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((a.matrices()[k][i][j] - b.matrices()[k][i][j]).norm());
            }
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn touchstone_round_trip(net in arb_network(12), opts in arb_options()) {
        let text = write_touchstone(&net, &opts).unwrap();
        let back = parse_touchstone(&text, None).unwrap();
        prop_assert_eq!(back.grid().len(), net.grid().len());
        prop_assert!(max_entry_error(&net, &back) < 1e-12);
        for (f_in, f_out) in net.grid().iter().zip(back.grid().iter()) {
            prop_assert!((f_in - f_out).abs() <= 1e-9 * f_in.abs());
        }
    }

    #[test]
    fn format_invariance(net in arb_network(8)) {
        let mut parsed = Vec::new();
        for fmt in [DataFormat::Ri, DataFormat::Ma, DataFormat::Db] {
            let opts = TouchstoneOptions {
                frequency_unit: FrequencyUnit::GHz,
                data_format: fmt,
                reference_impedance: 50.0,
                version: TouchstoneVersion::V1,
            };
            parsed.push(parse_touchstone(&write_touchstone(&net, &opts).unwrap(), None).unwrap());
        }
        prop_assert!(max_entry_error(&parsed[0], &parsed[1]) < 1e-9);
        prop_assert!(max_entry_error(&parsed[0], &parsed[2]) < 1e-9);
    }

    #[test]
    fn pure_delay_recovery(
        tau_fs in 0.0f64..10_000.0,       // femtoseconds, up to 10 ps
        points in 24usize..120,
        f_start in 1.0e6f64..5.0e8,
        t0_ps in 0.0f64..100.0,
    ) {
        let tau = tau_fs * 1e-15;
        let t0 = t0_ps * 1e-12;
        // Stay below the first differential cancellation null with >= 10 points.
        let f_null = 1.0 / (2.0 * tau.max(0.5e-12));
        let f_end = (0.8 * f_null).max(f_start * 2.0);
        // Keep the per-step phase of the total line delay well under pi so
        // the unwrap is sampled adequately.
        let min_points = (2.0 * std::f64::consts::TAU * f_end * (t0 + tau)).ceil() as usize + 2;
        let points = points.max(min_points);
        let spec = ChannelSpec {
            grid: FrequencyGrid::uniform(f_start, f_end, points).unwrap(),
            base_delay: t0,
            loss: LossModel::default(),
            coupling: 0.0,
        };
        let base = ideal_diff_channel(&spec).unwrap();
        let net = inject_se_delay(&base, Line::P, Side::Left, &SkewProfileSpec::Flat { tau });
        let mm = to_mixed_mode(&net);
        for dir in [SkewDirection::AtPort1, SkewDirection::AtPort2] {
            let profile = pn_skew(&mm, dir).unwrap();
            for &t in profile.t_skew() {
                prop_assert!((t - tau).abs() < 1e-15, "tau {} recovered as {}", tau, t);
            }
        }
    }

    #[test]
    fn passive_channels_keep_sdd_below_unity(
        coupling in 0.0f64..0.3,
        t0_ps in 1.0f64..200.0,
        dc_db in 0.0f64..1.0,
    ) {
        let spec = ChannelSpec {
            grid: FrequencyGrid::uniform(1.0e8, 1.1e11, 64).unwrap(),
            base_delay: t0_ps * 1e-12,
            loss: LossModel {
                dc_db,
                skin_db_per_sqrt_hz: 0.0,
                dielectric_db_per_hz: 0.0,
            },
            coupling,
        };
        let net = ideal_diff_channel(&spec).unwrap();
        let mm = to_mixed_mode(&net);
        for v in &mm.sdd21 {
            prop_assert!(v.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn direction_reversal_keeps_fom_set(
        tau_ps in 0.1f64..2.0,
        coupling in 0.0f64..0.01,
    ) {
        let spec = ChannelSpec {
            grid: FrequencyGrid::uniform(1.0e8, 1.1e11, 220).unwrap(),
            base_delay: 4.0e-11,
            loss: LossModel::default(),
            coupling,
        };
        let base = ideal_diff_channel(&spec).unwrap();
        let net = inject_se_delay(
            &base,
            Line::P,
            Side::Left,
            &SkewProfileSpec::Flat { tau: tau_ps * 1e-12 },
        );
        let flipped = net.clone().with_port_map(net.port_map().flipped_lr());
        let cfg = FomConfig::pam4_224g();
        let a = fom_sild(&sild(&net).unwrap(), &cfg).unwrap();
        let b = fom_sild(&sild(&flipped).unwrap(), &cfg).unwrap();
        let mut set_a = [a.fom_1, a.fom_2];
        let mut set_b = [b.fom_1, b.fom_2];
        set_a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        set_b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        prop_assert!((set_a[0] - set_b[0]).abs() < 1e-9);
        prop_assert!((set_a[1] - set_b[1]).abs() < 1e-9);
    }

    #[test]
    fn histogram_conserves_counts(
        values in proptest::collection::vec(0.0f64..1.0, 0..200),
        width in 0.01f64..0.2,
    ) {
        let h = histogram(&values, width);
        prop_assert_eq!(h.total() as usize, values.len());
        prop_assert_eq!(h.edges().len(), h.counts.len() + 1);
    }
}
