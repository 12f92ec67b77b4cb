use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn andor(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_andor"))
        .args(args)
        .env("ANDOR_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn simulate_is_deterministic_and_accurate() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = andor(
            dir.path(),
            &[
                "simulate",
                "--v",
                "1",
                "--samples",
                "1000000",
                "--seed",
                "7",
                "--out",
                out.to_str().unwrap(),
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let r = json(&a);
    assert_eq!(r["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(num(&r["meta"]["seed"]), 7.0);
    assert_eq!(num(&r["meta"]["v"]), 1.0);
    let p = &r["simulation"]["p_and_wins"];
    assert!((num(&p["mean"]) - 0.25).abs() <= 3.0 * num(&p["se"]));
    assert!((num(&r["closed_form"]["p_and_wins"]) - 0.25).abs() < 1e-9);
}

#[test]
fn simulate_csv_has_a_header_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let o = andor(
        dir.path(),
        &[
            "simulate",
            "--v",
            "2",
            "--samples",
            "1000",
            "--format",
            "csv",
        ],
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "quantity,estimate,standard_error,closed_form,v,seed,samples,version"
    );
    assert!(lines.next().unwrap().starts_with("p_and_wins,"));
    assert!(!text.contains('\r'));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = andor(dir.path(), &["simulate", "--v", "0.3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Walrasian"));
    assert_eq!(
        code(&andor(
            dir.path(),
            &["simulate", "--v", "1", "--samples", "0"]
        )),
        2
    );
    assert_eq!(
        code(&andor(
            dir.path(),
            &["simulate", "--v", "1", "--tie", "sometimes"]
        )),
        2
    );
    assert_eq!(
        code(&andor(
            dir.path(),
            &["solve", "--v", "1", "--mode", "diagonal"]
        )),
        2
    );
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        code(&andor(
            dir.path(),
            &["verify", "--v", "1", "--profile", missing.to_str().unwrap()]
        )),
        2
    );
    assert_eq!(
        code(&andor(dir.path(), &["figures", "--figure", "revenue"])),
        2
    );
}

#[test]
fn verify_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let o = andor(
        dir.path(),
        &["verify", "--v", "1", "--grid-step", "0.001953125"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = json(&dir.path().join("verify.json"));
    assert!(num(&r["equilibrium"]["eps_and"]) <= 1e-9);
    assert!(num(&r["equilibrium"]["eps_or"]) <= 0.001953125);
    assert!((num(&r["equilibrium"]["u_or_star"]) - 0.5).abs() < 1e-12);
    assert_eq!(r["characterization"]["holds"], true);
}

#[test]
fn verify_rejects_a_perturbed_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("perturbed.csv");
    fs::write(
        &profile,
        "player,x1,x2,probability\nand,0.2,0.2,0.5\nand,0,0,0.5\nor,0.3,0,0.5\nor,0,0.3,0.5\n",
    )
    .unwrap();
    let o = andor(
        dir.path(),
        &[
            "verify",
            "--v",
            "2",
            "--profile",
            profile.to_str().unwrap(),
            "--grid-step",
            "0.01",
        ],
    );
    assert_eq!(code(&o), 3);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("violation"), "{stdout}");
    let r = json(&dir.path().join("verify.json"));
    assert_eq!(r["equilibrium"]["is_eps_nash"], false);
    assert!(!r["characterization"]["violations"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn solve_with_fictitious_play_and_verify_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let o = andor(
        dir.path(),
        &[
            "solve",
            "--v",
            "1",
            "--mode",
            "structured",
            "--grid",
            "51",
            "--iters",
            "100000",
            "--seed",
            "7",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("solve.json"));
    assert_eq!(r["result"]["solver"], "fictitious-play");
    let c = &r["result"]["profile"]["comparison"];
    for key in ["ks_and", "ks_or"] {
        for d in c[key].as_array().unwrap() {
            assert!(num(d) < 0.05, "{key}: {c}");
        }
    }
    assert!(num(&c["origin_atom_deviation"]) < 0.05);
    assert!(num(&r["result"]["profile"]["eps"]) < 0.01);

    let profile = dir.path().join("profile.csv");
    assert!(fs::read_to_string(&profile)
        .unwrap()
        .starts_with("player,x1,x2,probability\n"));
    let o = andor(
        dir.path(),
        &[
            "verify",
            "--v",
            "1",
            "--profile",
            profile.to_str().unwrap(),
            "--grid-step",
            "0.02",
            "--tolerance",
            "0.05",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn solve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let o = andor(
            dir.path(),
            &[
                "solve", "--v", "1.5", "--grid", "21", "--iters", "5000", "--seed", "3",
            ],
        );
        assert_eq!(code(&o), 0);
        let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
        outputs.push((read("solve.json"), read("profile.csv")));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn pure_equilibrium_lists() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&andor(
            dir.path(),
            &["solve", "--v", "0.4", "--pure", "--tie", "and-wins"]
        )),
        0
    );
    let r = json(&dir.path().join("solve.json"));
    assert_eq!(r["result"]["solver"], "pure");
    assert!(!r["result"]["equilibria"].as_array().unwrap().is_empty());

    assert_eq!(
        code(&andor(dir.path(), &["solve", "--v", "1", "--pure"])),
        0
    );
    let r = json(&dir.path().join("solve.json"));
    assert!(r["result"]["equilibria"].as_array().unwrap().is_empty());
}

#[test]
fn support_enumeration_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = andor(
        dir.path(),
        &[
            "solve",
            "--v",
            "1",
            "--grid",
            "6",
            "--solver",
            "support-enumeration",
            "--max-support",
            "3",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("solve.json"));
    let eqs = r["result"]["equilibria"].as_array().unwrap();
    assert!(!eqs.is_empty());
    assert!(eqs.iter().all(|e| num(&e["eps"]) < 1e-12));
    assert!(dir.path().join("profile.csv").exists());
}

#[test]
fn figures_default_range() {
    let dir = tempfile::tempdir().unwrap();
    let o = andor(dir.path(), &["figures"]);
    assert_eq!(code(&o), 0);
    for id in [
        "and-wins",
        "revenue-or",
        "revenue-total",
        "poa",
        "welfare-loss",
    ] {
        assert!(dir.path().join(format!("{id}.csv")).exists(), "{id}");
    }
    let poa = fs::read_to_string(dir.path().join("poa.csv")).unwrap();
    let mut rows = poa.lines();
    assert_eq!(rows.next().unwrap(), "v,poa");
    let (v_min, _) = rows
        .map(|l| {
            let (v, p) = l.split_once(',').unwrap();
            (v.parse::<f64>().unwrap(), p.parse::<f64>().unwrap())
        })
        .filter(|&(v, _)| v < 1.0)
        .fold((0.0, f64::INFINITY), |best, row| {
            if row.1 < best.1 {
                row
            } else {
                best
            }
        });
    assert!((v_min - 0.643).abs() <= 0.01, "{v_min}");

    let s = json(&dir.path().join("summary.json"));
    let loss = num(&s["loss_constant"]["welfare_loss"]);
    assert!((loss - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-3);
    assert!((num(&s["poa_minima"][0]["v"]) - 0.643028).abs() < 1e-3);
    assert!((num(&s["poa_minima"][1]["poa"]) - 0.945682).abs() < 1e-3);
}

#[test]
fn single_figure() {
    let dir = tempfile::tempdir().unwrap();
    let o = andor(dir.path(), &["figures", "--figure", "and-wins"]);
    assert_eq!(code(&o), 0);
    let names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, vec!["and-wins.csv".to_string()]);
    let text = fs::read_to_string(dir.path().join("and-wins.csv")).unwrap();
    assert!(text.lines().any(|l| l == "1,0.25"), "crossover row missing");
}
