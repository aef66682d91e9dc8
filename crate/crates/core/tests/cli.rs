use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn taxreorg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taxreorg"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn running_example(dir: &Path) {
    fs::write(
        dir.join("is_a.txt"),
        "R\tA\nR\tB\nR\tC\nA\tA1\nA\tA2\nB\tB1\nB1\tB2\n",
    )
    .unwrap();
    fs::write(
        dir.join("counts.txt"),
        "R\t0\nA\t10\nA1\t3\nA2\t4\nB\t1\nB1\t2\nB2\t5\nC\t100\n",
    )
    .unwrap();
}

#[test]
fn bottom_up_running_example() {
    let dir = tempfile::tempdir().unwrap();
    running_example(dir.path());
    let out = taxreorg(
        dir.path(),
        &[
            "reorg-bottomup",
            "--isa",
            "is_a.txt",
            "--counts",
            "counts.txt",
            "--tb",
            "20",
            "--tp",
            "10",
            "--ts",
            "50",
            "--out",
            "lm.tsv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(dir.path().join("lm.tsv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# taxreorg "));
    assert_eq!(
        lines.collect::<Vec<_>>().join("\n"),
        "#labelmap\tv1\tbottomup t_b=20 t_p=10 t_s=50 seed=0 order=roll,bind,promote,subsample\n\
         0\tA\t17\tA,A1,A2\n\
         1\tC\t100\tC\n\
         #UNASSIGNED\n\
         B\t1\nB1\t2\nB2\t5\nR\t0"
    );
}

#[test]
fn presets_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    running_example(dir.path());
    let out = taxreorg(
        dir.path(),
        &[
            "reorg-bottomup",
            "--isa",
            "is_a.txt",
            "--counts",
            "counts.txt",
            "--preset",
            "bottomup-13k",
            "--tp",
            "1",
            "--out",
            "lm.tsv",
        ],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("lm.tsv")).unwrap();
    assert!(text.contains("bottomup t_b=3000 t_p=1 t_s=2000 seed=0"));

    let out = taxreorg(
        dir.path(),
        &[
            "reorg-topdown",
            "--isa",
            "is_a.txt",
            "--counts",
            "counts.txt",
            "--preset",
            "topdown-4k",
            "--tt",
            "5",
            "--out",
            "td.tsv",
        ],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("td.tsv")).unwrap();
    assert!(text.contains("topdown t_t=5 budget=4000"));
    // A, B and C qualify in layer 1, B1 (7) in layer 2, B2 (5) in layer 3.
    assert_eq!(
        text.lines()
            .filter(|l| l.as_bytes()[0].is_ascii_digit())
            .count(),
        5
    );
}

#[test]
fn eval_perfect_ranking() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("s.csv"),
        "item_id,score\na,0.9\nb,0.5\nc,0.1\n",
    )
    .unwrap();
    fs::write(dir.path().join("l.csv"), "item_id,label\na,1\nb,0\nc,0\n").unwrap();
    let out = taxreorg(
        dir.path(),
        &["eval", "--scores", "s.csv", "--labels", "l.csv"],
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "ap\ts\t1\nmap\t1\n");
}

#[test]
fn stats_keys() {
    let dir = tempfile::tempdir().unwrap();
    running_example(dir.path());
    let out = taxreorg(
        dir.path(),
        &["stats", "--isa", "is_a.txt", "--counts", "counts.txt"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in [
        "class_count\t8",
        "nonempty_class_count\t7",
        "total_images\t125",
        "singleton_classes\t1",
        "max_count_class\tC\t100",
    ] {
        assert!(text.lines().any(|l| l == key), "missing `{key}` in\n{text}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    running_example(dir.path());
    let code = |args: &[&str]| taxreorg(dir.path(), args).status.code().unwrap();

    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(
        code(&[
            "reorg-bottomup",
            "--isa",
            "is_a.txt",
            "--counts",
            "counts.txt",
            "--out",
            "lm.tsv"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "reorg-bottomup",
            "--isa",
            "is_a.txt",
            "--counts",
            "counts.txt",
            "--tb",
            "1",
            "--tp",
            "1",
            "--ts",
            "1",
            "--bogus",
            "--out",
            "lm.tsv"
        ]),
        1
    );
    assert!(
        !dir.path().join("lm.tsv").exists(),
        "usage errors must not write outputs"
    );

    fs::write(dir.path().join("bad_counts.txt"), "A\t-3\n").unwrap();
    assert_eq!(
        code(&[
            "validate",
            "--isa",
            "is_a.txt",
            "--counts",
            "bad_counts.txt"
        ]),
        2
    );
    assert_eq!(
        code(&["validate", "--isa", "missing.txt", "--counts", "counts.txt"]),
        2
    );

    fs::write(dir.path().join("cycle.txt"), "A\tB\nB\tA\n").unwrap();
    assert_eq!(
        code(&["validate", "--isa", "cycle.txt", "--counts", "counts.txt"]),
        3
    );
    assert_eq!(
        code(&[
            "reorg-bottomup",
            "--isa",
            "is_a.txt",
            "--counts",
            "counts.txt",
            "--tb",
            "1",
            "--tp",
            "1",
            "--ts",
            "0",
            "--out",
            "lm.tsv"
        ]),
        3
    );
    assert!(!dir.path().join("lm.tsv").exists());

    fs::write(dir.path().join("s.csv"), "a,1\nb,0\n").unwrap();
    fs::write(dir.path().join("l.csv"), "a,0\nb,0\n").unwrap();
    assert_eq!(code(&["eval", "--scores", "s.csv", "--labels", "l.csv"]), 3);
    assert_eq!(
        code(&["validate", "--isa", "is_a.txt", "--counts", "counts.txt"]),
        0
    );
}

#[test]
fn train_list_follows_plan() {
    let dir = tempfile::tempdir().unwrap();
    running_example(dir.path());
    let mut images = String::new();
    for (s, c) in [
        ("A", 10),
        ("A1", 3),
        ("A2", 4),
        ("B", 1),
        ("B1", 2),
        ("B2", 5),
        ("C", 100),
    ] {
        for i in 0..c {
            images.push_str(&format!("{s}\t{s}_{i}\n"));
        }
    }
    fs::write(dir.path().join("images.txt"), images).unwrap();
    let ok = |args: &[&str]| assert!(taxreorg(dir.path(), args).status.success(), "{args:?}");
    ok(&[
        "reorg-bottomup",
        "--isa",
        "is_a.txt",
        "--counts",
        "counts.txt",
        "--tb",
        "20",
        "--tp",
        "10",
        "--ts",
        "12",
        "--seed",
        "9",
        "--out",
        "lm.tsv",
        "--plan",
        "plan.tsv",
        "--log",
        "log.tsv",
    ]);
    ok(&[
        "export-trainlist",
        "--labelmap",
        "lm.tsv",
        "--plan",
        "plan.tsv",
        "--images",
        "images.txt",
        "--out",
        "train.tsv",
    ]);
    let text = fs::read_to_string(dir.path().join("train.tsv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.iter().filter(|r| r.ends_with("\t0")).count(), 12);
    assert_eq!(rows.iter().filter(|r| r.ends_with("\t1")).count(), 12);
    let log = fs::read_to_string(dir.path().join("log.tsv")).unwrap();
    assert!(log.lines().any(|l| l == "roll\tB1\tB\t2"));
}
