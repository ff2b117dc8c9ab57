use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levelwidth")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn box_widths_table() {
    let o = run(&["widths", "--potential", "box:L=1", "--gamma", "0.01", "--levels", "100", "--method", "exact"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# columns: n,E_n,Gamma_n,Gamma_over_gamma_n\n"));
    let rows = data_rows(&o);
    assert_eq!(rows.len(), 100);
    let last = &rows[99];
    assert_eq!(last[0], "100");
    let r: f64 = last[3].parse().unwrap();
    assert!((r - 0.855955390454059).abs() < 1e-9, "{r}");
}

#[test]
fn harmonic_prefactor_row() {
    let o = run(&["prefactor", "--alpha", "2", "--lmax", "200"]);
    assert!(o.status.success());
    let rows = data_rows(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "2.0");
    assert!((rows[0][1].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["widths", "--potential", "nope:x=1", "--gamma", "1"]).status.code(), Some(2));
    assert_eq!(run(&["widths", "--potential", "harmonic:omega=1", "--gamma", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["widths", "--potential", "harmonic:omega=1", "--gamma", "1", "--bath", "cold"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--potential", "powerlaw:A=1,alpha=4", "--method", "exact"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // Too few harmonics for a tail fit is a convergence failure, not bad input.
    let o = run(&["prefactor", "--alpha", "-1", "--wall", "--lmax", "20"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["dipoles", "--potential", "powerlaw:A=1,alpha=4", "--n", "12", "--method", "semiclassical"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_rows(&a).len(), 12);
}

#[test]
fn writes_out_file_and_json() {
    let dir = std::env::temp_dir().join(format!("levelwidth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spectrum.csv");
    let o = run(&["spectrum", "--potential", "harmonic:omega=2", "--levels", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with("0,1.0\n1,3.0\n2,5.0\n3,7.0\n"), "{text}");

    let o = run(&["spectrum", "--potential", "harmonic:omega=2", "--levels", "3", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["results"].as_array().unwrap().len(), 4);
    assert_eq!(doc["results"][1]["E_n"], 3.0);
    assert_eq!(doc["config"]["command"]["levels"], 3);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn density_of_states_columns() {
    let o = run(&["dos", "--emax", "2", "--de", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("# columns: E,rho,rho_error,rho_lorentzian\n"));
    let rows = data_rows(&o);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1][0], "1.0");
    let rho: f64 = rows[1][1].parse().unwrap();
    assert!((rho - 3.29483).abs() < 1e-4, "{rho}");
    assert_eq!(run(&["dos", "--bath", "ohmic"]).status.code(), Some(2));
}
