use std::path::Path;

use zol_core::experiment::{list_events, parse_n_range};
use zol_core::measures::ProbValue;
use zol_core::*;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text, Path::new(".")).unwrap()
}

#[test]
fn exact_rows_match_exact_probability() {
    let cfg = config("class = triangle-free\nevents = all-k-ext(1), true\nn = 3..5\nmode = exact\n");
    let table = run_experiment(&cfg).unwrap();
    assert_eq!(table.rows.len(), 6);
    let c = fixtures::triangle_free();
    let ev = PreparedEvent::new(&EventSpec::AllKExt(1), &c).unwrap();
    for row in table.rows.iter().filter(|r| r.event == "all-k-ext(1)") {
        let direct = exact_probability(&c, row.n, |s| ev.eval(s), MeasureKind::Uniform).unwrap();
        assert_eq!(row.result, direct);
    }
    let csv = table.to_csv(true);
    assert!(csv.starts_with("n,event,measure,mode,value,ci_low,ci_high,trials,seed\n"));
    assert!(csv.contains("\n3,true,uniform,exact,1/1,,,,\n"));
    assert!(csv.trim_end().lines().last().unwrap().starts_with("#version="));
}

#[test]
fn monte_carlo_tables_are_reproducible() {
    let text = "class = coloured:2\nmeasure = delta\nevents = xi-defines-colour, generating-colouring-rich(4)\nn = 8..9\nmode = mc:200\nseed = 11\n";
    let a = run_experiment(&config(text)).unwrap().to_csv(false);
    let b = run_experiment(&config(text)).unwrap().to_csv(false);
    assert_eq!(a, b);
    let t = run_experiment(&config(text)).unwrap();
    for r in &t.rows {
        let (lo, hi) = r.result.ci.unwrap();
        let ProbValue::Estimate(x) = r.result.value else { panic!("estimate") };
        assert!(lo <= x && x <= hi);
        assert_eq!(r.result.trials, Some(200));
    }
}

#[test]
fn colourable_classes_use_the_cover() {
    let cfg = config("class = colourable:2\nmeasure = delta\nevents = uniquely-colourable, all-k-colour-compat(1)\nn = 3..4\n");
    let t = run_experiment(&cfg).unwrap();
    assert_eq!(t.rows.len(), 4);
}

#[test]
fn validation_errors_name_the_field() {
    let err = ExperimentConfig::parse("class = all\nevents = true\nn = 4..2\n", Path::new(".")).unwrap_err();
    assert!(err.to_string().contains("n:"), "{err}");
    let err = ExperimentConfig::parse("class = all\nevents = true\nn = 2\nmode = mc:0\n", Path::new(".")).unwrap_err();
    assert!(err.to_string().contains("mode"), "{err}");
    let err = run_experiment(&config("class = all\nevents = uniquely-colourable\nn = 2\n")).unwrap_err();
    assert!(err.to_string().contains("coloured"), "{err}");
    assert!(parse_n_range("3").unwrap() == vec![3]);
}

#[test]
fn budget_errors_are_reported() {
    let err = run_experiment(&config("class = all\nvocab = digraph\nevents = true\nn = 7\n")).unwrap_err();
    assert!(matches!(err, ZolError::Budget { .. }), "{err}");
}

#[test]
fn file_events_resolve_relative_to_the_config() {
    let dir = tempdir();
    std::fs::write(
        dir.join("pair.txt"),
        "structure A\nn 2\nend\nstructure B\nn 3\nrel E 1 3\nrel E 2 3\nend\n",
    )
    .unwrap();
    std::fs::write(dir.join("edge.txt"), "structure F\nn 2\nrel E 1 2\nend\n").unwrap();
    let cfg = ExperimentConfig::parse(
        "class = triangle-free\nevents = has-copy(edge.txt) & mult-at-least(pair.txt;2), ext(pair.txt)\nn = 4\n",
        &dir,
    )
    .unwrap();
    let t = run_experiment(&cfg).unwrap();
    assert_eq!(t.rows[0].event, "has-copy(edge.txt) & mult-at-least(pair.txt;2)");
    assert_eq!(
        t.rows[0].result.exact_value().unwrap(),
        &num::BigRational::new(3.into(), 41.into())
    );
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn catalogue_lists_every_form() {
    let names: Vec<&str> = list_events().iter().map(|(n, _)| *n).collect();
    for want in ["uniquely-colourable", "all-colourings-rich(a)", "all-k-colour-compat(k)", "xi-defines-colour"] {
        assert!(names.contains(&want));
    }
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("zol-exp-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
