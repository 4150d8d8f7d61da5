use carleman_core::arcs::ArcSet;
use carleman_core::boundary::{extend_continuous, lusin_decompose, BoundaryFunction, BoundaryMeasure, ExtensionParams, ContinuousExtension};
use carleman_core::carleman::{anchor_step_function, measured_error, run, RunOptions, ToleranceSchedule};
use carleman_core::chaplet::{assemble_chaplet, boundary_probes, build_shells, check_kq, compatible_exhaustion, cover_balls, ChapletSet, CloudParams};
use carleman_core::geometry::{Ball, Domain};
use carleman_core::math::PI;
use carleman_core::OperatorKind;
use num_complex::Complex64;

fn step_setup(rho_max: f64) -> (ChapletSet, ContinuousExtension) {
    let s = ArcSet::arc(PI / 2.0 - 0.5, PI / 2.0 + 0.5).union(&ArcSet::arc(1.5 * PI - 0.5, 1.5 * PI + 0.5));
    let f = BoundaryFunction::step(0.0, 1.0, s).unwrap();
    let dec = lusin_decompose(&f, &BoundaryMeasure::ArcLength, 3).unwrap();
    let u = extend_continuous(&f, &dec, ExtensionParams { kappa: 100.0, cap: 1.0, core_radius: 0.25 }).unwrap();
    let d = Domain::UnitDisc;
    let cover = cover_balls(&d, &u, rho_max, 0.3).unwrap();
    let (shells, cert) = build_shells(&cover, &d, &boundary_probes(&d, 256)).unwrap();
    assert!(cert.pass);
    let ch = assemble_chaplet(&cover, &shells, &u.exceptional_sets(), f.jumps(), CloudParams::default()).unwrap();
    (ch, u)
}

fn step_chaplet(rho_max: f64) -> ChapletSet {
    step_setup(rho_max).0
}

#[test]
fn small_run_bounds_hold() {
    let (ch, u) = step_setup(0.6);
    let ex = compatible_exhaustion(&ch, &[0.4, 0.6]).unwrap();
    let sched = ToleranceSchedule::new(0.5, 0.5, &ex).unwrap();
    let g: Vec<f64> = anchor_step_function(&ch, &u).iter().map(|a| a.value).collect();
    assert!(g.iter().all(|&v| v == 0.0 || v == 1.0));
    let cert = run(&ch, &ex, &g, &sched, OperatorKind::CauchyRiemann, RunOptions { max_degree: 64, ..RunOptions::default() }).unwrap();
    assert_eq!(cert.stages.len(), 2);
    for j in 0..ch.component_count() {
        assert!(measured_error(&ch, &cert, j) <= cert.bounds[j] * (1.0 + 1e-9) + 1e-12);
    }
}

#[test]
fn zero_anchors_give_zero_polynomial() {
    let (ch, _) = step_setup(0.6);
    let ex = compatible_exhaustion(&ch, &[0.4, 0.6]).unwrap();
    let sched = ToleranceSchedule::new(0.5, 0.5, &ex).unwrap();
    let g = vec![0.0; ch.component_count()];
    let cert = run(&ch, &ex, &g, &sched, OperatorKind::Laplace, RunOptions::default()).unwrap();
    assert!(cert.all_pass());
    assert!(cert.bounds.iter().all(|&b| b == 0.0));
    assert_eq!(cert.polynomial.eval(Complex64::new(0.3, 0.2)), Complex64::new(0.0, 0.0));
}

#[test]
fn step_chaplet_is_connected_and_exhaustible() {
    let ch = step_chaplet(0.85);
    let t = std::time::Instant::now();
    let c = ch.connectivity(1.0 / 512.0);
    eprintln!("components {} balls {} shells {} conn {:?} in {:?}", ch.component_count(), ch.cover.len(), ch.shells.len(), c, t.elapsed());
    assert!(c.pass, "{c:?}");
    let ex = compatible_exhaustion(&ch, &[0.45, 0.8, 0.87]).unwrap();
    eprintln!("outer {:?} per stage {:?}", ex.outer_radii(), (1..=3).map(|n| ex.new_at(n).len()).collect::<Vec<_>>());
    assert!(ex.audit(&ch));
    assert!(ex.engulf.iter().all(|&n| (1..=3).contains(&n)));
}

#[test]
fn kq_witness_for_half_disc() {
    let ch = step_chaplet(0.85);
    let w = check_kq(&ch, &[Ball { center: Complex64::new(0.0, 0.0), radius: 0.5 }]).unwrap();
    assert!(w.verified);
    for k in 0..720 {
        let t = k as f64 * PI / 360.0;
        let z = Complex64::from_polar(w.q.radius, t);
        if let Some(j) = ch.component_of(z) {
            assert!(w.q.members.contains(&j));
        }
    }
}
