use std::path::{Path, PathBuf};
use std::process::Command;

use rdp::cli::io::{read_samples, write_samples};
use rdp::cli::{run_from, RunReport};
use rdp::{Error, SampleSet};
use tempfile::TempDir;

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn run(args: &[&str]) -> rdp::Result<()> {
    run_from(std::iter::once("rdp").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(p: &Path) -> Vec<String> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn generate_writes_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let two = path(&dir, "two.csv");
    run(&[
        "generate",
        "two-domain",
        "--snr",
        "10",
        "--seed",
        "42",
        "--out",
        s(&two),
    ])
    .unwrap();
    let rows = lines(&two);
    assert_eq!(rows[0], "x,y");
    assert_eq!(rows.len() - 1, 2001);

    let quad = path(&dir, "quad.csv");
    run(&["generate", "quad2d", "--out", s(&quad)]).unwrap();
    let rows = lines(&quad);
    assert_eq!(rows[0], "x,y,z");
    assert_eq!(rows.len() - 1, 121);

    let vec = path(&dir, "vec.csv");
    run(&[
        "generate",
        "vector2d",
        "--nx",
        "6",
        "--ny",
        "5",
        "--out",
        s(&vec),
    ])
    .unwrap();
    let rows = lines(&vec);
    assert_eq!(rows[0], "x,y,u,v");
    assert_eq!(rows.len() - 1, 30);
}

#[test]
fn high_q_accepts_no_boundary_on_noisy_sets() {
    let dir = tempfile::tempdir().unwrap();
    for system in ["two-domain", "three-domain", "quad2d", "vector2d"] {
        let data = path(&dir, &format!("{system}.csv"));
        let out = path(&dir, &format!("{system}.json"));
        run(&[
            "generate",
            system,
            "--snr",
            "10",
            "--seed",
            "42",
            "--step",
            "0.1",
            "--out",
            s(&data),
        ])
        .unwrap();
        run(&[
            "partition",
            "--input",
            s(&data),
            "--q",
            "0.99",
            "--out",
            s(&out),
        ])
        .unwrap();
        let report: RunReport =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(report.boundaries.is_empty(), "{system}");
        assert_eq!(report.leaves.len(), 1);
        assert!(report.tree.children.is_empty());
    }
}

#[test]
fn quad_2d_surface_minimum_touches_top_and_right_edges() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(&dir, "quad.csv");
    let out = path(&dir, "surface.csv");
    run(&["generate", "quad2d", "--out", s(&data)]).unwrap();
    run(&["loss-surface", "--input", s(&data), "--out", s(&out)]).unwrap();
    let (i, j, _) = lines(&out)[1..]
        .iter()
        .filter_map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (!f[2].is_empty()).then(|| {
                (
                    f[0].parse::<usize>().unwrap(),
                    f[1].parse::<usize>().unwrap(),
                    f[2].parse::<f64>().unwrap(),
                )
            })
        })
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .unwrap();
    let perim: Vec<(f64, f64)> = lines(&out.with_extension("perimeter.csv"))[1..]
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    // Geometric membership: top is y = 1, right is x = 1.
    let (a, b) = (perim[i], perim[j]);
    let top_right = |p: (f64, f64), q: (f64, f64)| p.1 == 1.0 && q.0 == 1.0;
    assert!(top_right(a, b) || top_right(b, a), "{a:?} {b:?}");
}

#[test]
fn clean_two_domain_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(&dir, "two.csv");
    let out = path(&dir, "report.json");
    run(&["generate", "two-domain", "--step", "0.1", "--out", s(&data)]).unwrap();
    run(&[
        "partition",
        "--input",
        s(&data),
        "--out",
        s(&out),
        "--sequential",
    ])
    .unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let report: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.boundaries.len(), 1);
    assert_eq!(report.boundaries[0].boundary.params, vec![10.0]);
    let degrees: Vec<Vec<u32>> = report
        .leaves
        .iter()
        .map(|l| l.model.degrees.clone())
        .collect();
    assert_eq!(degrees, [vec![2], vec![1]]);
    assert_eq!(report.tree.leaves().len(), 2);
    assert!(!report.config.parallel);
    let again = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(serde_json::from_str::<RunReport>(&again).unwrap(), report);
}

#[test]
fn loss_surface_1d_minimum_sits_at_the_break() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(&dir, "two.csv");
    let out = path(&dir, "surface.csv");
    run(&["generate", "two-domain", "--step", "0.1", "--out", s(&data)]).unwrap();
    run(&["loss-surface", "--input", s(&data), "--out", s(&out)]).unwrap();
    let rows = lines(&out);
    assert_eq!(rows[0], "threshold,total_loss");
    let (t, _) = rows[1..]
        .iter()
        .filter_map(|r| {
            let (t, l) = r.split_once(',').unwrap();
            (!l.is_empty()).then(|| (t.parse::<f64>().unwrap(), l.parse::<f64>().unwrap()))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert_eq!(t, 10.0);
}

#[test]
fn loss_surface_2d_lists_every_cross_edge_pair() {
    let dir = tempfile::tempdir().unwrap();
    let data = path(&dir, "quad.csv");
    let out = path(&dir, "surface.csv");
    run(&[
        "generate",
        "quad2d",
        "--nx",
        "3",
        "--ny",
        "3",
        "--out",
        s(&data),
    ])
    .unwrap();
    run(&[
        "loss-surface",
        "--input",
        s(&data),
        "--max-degree",
        "0",
        "--min-points",
        "1",
        "--out",
        s(&out),
    ])
    .unwrap();
    let rows = lines(&out);
    assert_eq!(rows[0], "i,j,total_loss");
    assert_eq!(rows.len() - 1, 22);
    let perim = lines(&out.with_extension("perimeter.csv"));
    assert_eq!(perim[0], "index,x,y,edge");
    assert_eq!(perim.len() - 1, 8);
    assert_eq!(perim[1], "0,0,0,1");
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(&dir, "d.csv");
    let xs = [0.1, 0.2 + 1e-17, 1.0 / 3.0, 7.0];
    let ys = [-1e-300, 2.5, f64::MAX, 1.0 / 7.0];
    let data = SampleSet::from_xy(&xs, &ys).unwrap();
    write_samples(&p, &data).unwrap();
    assert_eq!(read_samples(&p, None).unwrap(), data);
}

#[test]
fn library_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(&dir, "missing.csv");
    let out = path(&dir, "r.json");
    let err = run(&["partition", "--input", s(&missing), "--out", s(&out)]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(matches!(run(&["partition"]).unwrap_err(), Error::Usage(_)));
    assert!(matches!(
        run(&["generate", "two-domain", "--step", "0", "--out", s(&out)]).unwrap_err(),
        Error::Usage(_)
    ));
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rdp"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = path(&dir, "quad.csv");
    let bad = path(&dir, "bad.csv");
    let out = path(&dir, "r.json");
    std::fs::write(&bad, "x,y\n0,1\n1,oops\n").unwrap();

    assert_eq!(binary(&["--help"]).status.code(), Some(0));
    assert_eq!(binary(&["frobnicate"]).status.code(), Some(1));
    let o = binary(&["partition", "--input", s(&bad), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(
        binary(&["generate", "quad2d", "--out", s(&good)])
            .status
            .code(),
        Some(0)
    );
    // Bilinear family on the default grid.
    let o = binary(&[
        "partition",
        "--input",
        s(&good),
        "--max-degree",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
