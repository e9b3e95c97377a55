use gk_core::sweep::{plot_from_rows, rows_to_csv, run_sweep, spectrum_plot, PlotKind, SweepConfig};
use gk_core::{open_stream, GkError, ShapeSequence};

#[test]
fn relative_paths_resolve_against_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "[sweep]\nshape = const:c=1\nd = 1..4\neps = 0.5\n[output]\npath = out/table.csv\nplot = n_vs_d:nd.csv\n",
    )
    .unwrap();
    let cfg = SweepConfig::load(&cfg_path).unwrap();
    assert_eq!(cfg.output.as_deref(), Some(dir.path().join("out/table.csv").as_path()));
    assert_eq!(cfg.plots[0].1, dir.path().join("nd.csv"));

    let rows = run_sweep(&cfg).unwrap();
    let plot = plot_from_rows(&rows, PlotKind::NVsD).unwrap();
    plot.write(&cfg.plots[0].1).unwrap();
    let text = std::fs::read_to_string(&cfg.plots[0].1).unwrap();
    let ys: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ys.len(), 4);
    assert!(ys.windows(2).all(|w| w[0] < w[1]));
    assert!(rows_to_csv(&rows, &cfg.notions).starts_with("d,eps,n_avg"));
}

#[test]
fn missing_config_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    match SweepConfig::load(&missing) {
        Err(e @ GkError::Io { .. }) => assert!(e.to_string().contains("nope.cfg")),
        other => panic!("expected io error, got {other:?}"),
    }
}

#[test]
fn plot_write_failure_carries_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut stream = open_stream(&ShapeSequence::constant(1.0).unwrap(), 1).unwrap();
    let batch = stream.next_batch(5).unwrap();
    let target = dir.path().join("no/such/dir/spectrum.csv");
    let err = spectrum_plot(1, &batch).write(&target).unwrap_err();
    assert!(err.to_string().contains("spectrum.csv"));
}

#[test]
fn spectrum_plot_is_a_straight_line_in_one_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let mut stream = open_stream(&ShapeSequence::constant(2.0).unwrap(), 1).unwrap();
    let batch = stream.next_batch(30).unwrap();
    let path = dir.path().join("s.csv");
    spectrum_plot(1, &batch).write(&path).unwrap();
    let ys: Vec<f64> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let step = ys[1] - ys[0];
    assert!(ys.windows(2).all(|w| ((w[1] - w[0]) - step).abs() < 1e-12));
}
