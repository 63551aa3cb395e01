use proptest::prelude::*;
use quietpump_core::plant::{
    gen_excitation, synth_weather, Disturbance, Excitation, RcParams, RcPlant, WeatherParams,
};
use quietpump_core::series::{default_start, STEP_SECONDS, STEPS_PER_DAY};

const DT: f64 = STEP_SECONDS as f64;

fn calm(t_amb: f64) -> Disturbance {
    Disturbance {
        t_amb,
        solar: 0.0,
        occupancy_w: 0.0,
    }
}

/// Air temperature after holding `u` for 60 days at a fixed outdoor
/// temperature.
fn settled(u: f64, t_amb: f64) -> f64 {
    let mut p = RcPlant::new(RcParams::default(), [t_amb; 3]).unwrap();
    let mut last = t_amb;
    for _ in 0..60 * STEPS_PER_DAY {
        last = p.step(u, calm(t_amb), DT).unwrap();
    }
    last
}

#[test]
fn equilibrium_is_kept() {
    let mut p = RcPlant::new(RcParams::default(), [20.0; 3]).unwrap();
    for _ in 0..10 {
        p.step(0.0, calm(20.0), DT).unwrap();
    }
    for x in p.state() {
        assert!((x - 20.0).abs() < 1e-9);
    }
}

#[test]
fn passive_cooling_lowers_air_temperature() {
    let mut p = RcPlant::new(RcParams::default(), [21.0; 3]).unwrap();
    let mut last = p.t_air();
    for _ in 0..20 {
        let t = p.step(0.0, calm(0.0), DT).unwrap();
        assert!(t < last);
        last = t;
    }
}

#[test]
fn steady_state_rises_with_input() {
    // heat balance oracle: T_air = T_out + cop P u / UA once the floor and
    // envelope have settled
    let params = RcParams::default();
    let mut prev = f64::NEG_INFINITY;
    for u in [0.0, 0.25, 0.5, 1.0] {
        let t = settled(u, 0.0);
        let want = u * params.cop * params.p_max_w / params.total_ua();
        assert!((t - want).abs() < 1e-3, "u {u}: {t} vs {want}");
        assert!(t > prev);
        prev = t;
    }
}

#[test]
fn rejects_bad_input_and_params() {
    let mut p = RcPlant::new(RcParams::default(), [20.0; 3]).unwrap();
    assert!(p.step(1.5, calm(0.0), DT).is_err());
    assert!(p.step(0.5, calm(0.0), 0.0).is_err());
    let bad = RcParams {
        cop: 0.5,
        ..Default::default()
    };
    assert!(RcPlant::new(bad, [20.0; 3]).is_err());
    let bad = RcParams {
        c_air: 0.0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
}

#[test]
fn weather_is_seeded_and_flat_without_variation() {
    let p = WeatherParams::default();
    let a = synth_weather(&p, default_start(), 3, 5).unwrap();
    assert_eq!(a, synth_weather(&p, default_start(), 3, 5).unwrap());
    assert_ne!(a, synth_weather(&p, default_start(), 3, 6).unwrap());
    assert_eq!(a.t_amb.len(), 3 * STEPS_PER_DAY);
    assert!(a.solar.iter().all(|&s| s >= 0.0));

    let flat = WeatherParams {
        amplitude_c: 0.0,
        perturbation_c: 0.0,
        ..Default::default()
    };
    let w = synth_weather(&flat, default_start(), 2, 1).unwrap();
    assert!(w.t_amb.iter().all(|&t| t == flat.mean_c));
    assert!(synth_weather(&p, default_start(), 0, 1).is_err());
}

#[test]
fn excitation_overrides() {
    let mut ex = Excitation::new(3);
    for _ in 0..50 {
        assert_eq!(ex.next(30.0), 0.0);
        assert_eq!(ex.next(10.0), 1.0);
    }
    let u = gen_excitation(4, &vec![21.0; 500]);
    assert!(u.iter().all(|x| (0.0..=1.0).contains(x)));
    // dwell of 2..12 steps keeps runs piecewise constant
    let changes = u.windows(2).filter(|w| w[0] != w[1]).count();
    assert!(changes <= 500 / 2 && changes >= 500 / 12 - 1, "{changes}");
    assert_eq!(u, gen_excitation(4, &vec![21.0; 500]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn response_is_affine_in_inputs(
        u in prop::collection::vec(0.0f64..=1.0, 1..30),
        t_out in -10.0f64..15.0,
        solar in 0.0f64..500.0,
        init in 10.0f64..25.0,
    ) {
        // superposition: heat-pump effect does not depend on the disturbance
        let w = Disturbance { t_amb: t_out, solar, occupancy_w: 200.0 };
        let run = |scale: f64| {
            let mut p = RcPlant::new(RcParams::default(), [init; 3]).unwrap();
            u.iter().map(|&x| p.step(x * scale, w, DT).unwrap()).collect::<Vec<f64>>()
        };
        let (off, half, full) = (run(0.0), run(0.5), run(1.0));
        for k in 0..u.len() {
            let mid = (off[k] + full[k]) / 2.0;
            prop_assert!((half[k] - mid).abs() <= 1e-9);
            prop_assert!(full[k] >= off[k] - 1e-12);
        }
    }
}
