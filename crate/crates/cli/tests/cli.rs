use std::process::{Command, Output};

fn zol(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zol"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("zol runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn enumerate_counts_triangle_free_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let o = zol(&["enumerate", "--class", "triangle-free", "--n", "5", "--count-only"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "388");
    let o = zol(&["enumerate", "--class", "triangle-free", "--n", "5", "--iso", "--count-only"], dir.path());
    assert_eq!(stdout(&o).trim(), "14");
}

#[test]
fn check_star_reports_witness_and_absence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("k3.txt"), "structure K3\nn 3\nrel E 1 2\nrel E 1 3\nrel E 2 3\nend\n").unwrap();
    let o = zol(&["check-star", "--forbidden", "k3.txt"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("sound: true"));
    std::fs::write(
        dir.path().join("oriented.txt"),
        "structure loop\nn 1\nrel R 1 1\nend\nstructure double\nn 2\nrel R 1 2\nrel R 2 1\nend\n",
    )
    .unwrap();
    let o = zol(&["check-star", "--forbidden", "oriented.txt", "--vocab", "digraph"], dir.path());
    assert_eq!(stdout(&o).trim(), "none");
}

#[test]
fn admittance_finds_a_triangle() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pair.txt"), "structure A\nn 2\nend\nstructure B\nn 2\nrel E 1 2\nend\n").unwrap();
    let o = zol(&["check-admit", "--class", "triangle-free", "--pair", "pair.txt", "--max-n", "4"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("counterexample"), "{}", stdout(&o));
    let o = zol(&["check-admit", "--class", "all", "--pair", "pair.txt", "--max-n", "4"], dir.path());
    assert!(stdout(&o).starts_with("holds up to n = 4"));
}

#[test]
fn five_cycle_triple_has_no_amalgam() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("triple.txt"),
        "structure B1\nn 3\nrel E 1 3\nrel E 2 3\nend\nstructure B2\nn 4\nrel E 1 3\nrel E 3 4\nrel E 2 4\nend\n",
    )
    .unwrap();
    let o = zol(
        &["check-amalg", "--class", "colourable:2", "--triple", "triple.txt", "--common", "2"],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("counterexample"));
}

#[test]
fn gadgets_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = zol(&["gadgets", "--l", "2", "--strong", "false"], dir.path());
    assert!(stdout(&o).contains("I = {}"));
    let o = zol(&["count", "--mode", "mult", "--p", "2,2,2", "--m", "3"], dir.path());
    assert_eq!(stdout(&o).trim(), "192");
    let o = zol(&["count", "--mode", "mult", "--p", "2,2", "--n", "5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn prob_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = zol(
        &[
            "prob", "--class", "restricted-unary", "--measure", "delta", "--event", "unary-empty(Q)", "--n", "2..3",
            "--exact", "--fractions",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("2,unary-empty(Q),delta,exact,1/4,,,,"), "{out}");
    assert!(out.contains("3,unary-empty(Q),delta,exact,1/8,,,,"));
}

#[test]
fn experiment_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.cfg"),
        "# comment\nclass = coloured:2\nmeasure = delta\nevents = uniquely-colourable, generating-colouring-rich(4)\nn = 6..7\nmode = mc:100\nseed = 5\noutput = out.csv\n",
    )
    .unwrap();
    let o = zol(&["experiment", "--config", "exp.cfg"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    zol(&["experiment", "--config", "exp.cfg"], dir.path());
    assert_eq!(std::fs::read_to_string(dir.path().join("out.csv")).unwrap(), first);
    assert_eq!(first.lines().count(), 6);
    assert!(first.lines().last().unwrap().contains("config_hash="));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "class = all\nevents = true\nn = 5..2\n").unwrap();
    assert_eq!(zol(&["experiment", "--config", "bad.cfg"], dir.path()).status.code(), Some(1));
    let o = zol(&["prob", "--class", "all", "--vocab", "digraph", "--event", "true", "--n", "7"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(zol(&["no-such-command"], dir.path()).status.code(), Some(1));
    assert_eq!(zol(&["verify", "--criterion", "3"], dir.path()).status.code(), Some(0));
    assert_eq!(zol(&["verify", "--criterion", "9a-threshold"], dir.path()).status.code(), Some(3));
}
