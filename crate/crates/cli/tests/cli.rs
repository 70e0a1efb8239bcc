use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn relhyp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relhyp"))
        .args(args)
        .env("RELHYP_WORKERS", "2")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("relhyp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn classify_e1_with_its_map() {
    let out = relhyp(&[
        "classify",
        path(&fixture("e1.aut")),
        "--graph-map",
        path(&fixture("e1.graph.json")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        v["verdict"],
        "relatively hyperbolic w.r.t. {⟨c, a' b' a b⟩ ⋊ Z}"
    );
    assert_eq!(v["rotationless"]["power"], 2);
}

#[test]
fn text_report_and_rerender() {
    let json = scratch("swap.json", "");
    let out = relhyp(&["classify", path(&fixture("swap.aut")), "--out", path(&json)]);
    assert_eq!(out.status.code(), Some(0));
    let out = relhyp(&["report", path(&json), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("verdict: finite order ⇒ not virtually acylindrically hyperbolic"),
        "{text}"
    );
}

#[test]
fn exit_codes() {
    let bad_syntax = scratch("bad.aut", "a -> a b ;\nb -> %");
    assert_eq!(
        relhyp(&["classify", path(&bad_syntax)]).status.code(),
        Some(3)
    );
    let not_auto = scratch("endo.aut", "a -> a a ; b -> b");
    assert_eq!(
        relhyp(&["classify", path(&not_auto)]).status.code(),
        Some(2)
    );
    assert_eq!(
        relhyp(&["classify", "/nonexistent/file.aut"]).status.code(),
        Some(3)
    );
    let bad_config = scratch("bad.json", r#"{"m_flair": 2}"#);
    assert_eq!(
        relhyp(&[
            "classify",
            path(&fixture("swap.aut")),
            "--config",
            path(&bad_config)
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn nas_requires_an_eg_stratum() {
    let ok = relhyp(&["nas", path(&fixture("e1.graph.json")), "--stratum", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["z"], serde_json::json!(["c"]));
    let neg = relhyp(&["nas", path(&fixture("e1.graph.json")), "--stratum", "1"]);
    assert_eq!(neg.status.code(), Some(2));
}

#[test]
fn electric_distance() {
    let p = scratch("periph.json", r#"[["c"]]"#);
    let out = relhyp(&["electric-dist", "a c c c c b", "--peripherals", path(&p)]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["length"]["value"], 3);
    assert_eq!(v["rank"], 3);
}

#[test]
fn flaring_commands() {
    let corpus = scratch("corpus.txt", "# classes\na c\nb a c'\na b\n");
    let out = relhyp(&[
        "flare",
        "conj",
        "--graph-map",
        path(&fixture("e1.graph.json")),
        "--corpus",
        path(&corpus),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["per_item"].as_array().unwrap().len(), 3);
    let carried = scratch("carried.txt", "c c\n");
    let out = relhyp(&[
        "flare",
        "strict",
        "--graph-map",
        path(&fixture("e1.graph.json")),
        "--corpus",
        path(&carried),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn three_of_four_refuses_a_duplicate_pair() {
    let e1 = path(&fixture("e1.graph.json")).to_string();
    let inv = path(&fixture("e1_inverse.graph.json")).to_string();
    let out = relhyp(&[
        "flare",
        "three-of-four",
        "--phi-map",
        &e1,
        "--phi-inverse-map",
        &inv,
        "--psi-map",
        &e1,
        "--psi-inverse-map",
        &inv,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["standing"]["item1"]["status"], "fail");
    assert_eq!(v["standing"]["item2"]["status"], "fail");
}

#[test]
fn three_of_four_on_a_distinct_pair() {
    let out = relhyp(&[
        "flare",
        "three-of-four",
        "--phi-map",
        path(&fixture("plastic.graph.json")),
        "--phi-inverse-map",
        path(&fixture("plastic_inverse.graph.json")),
        "--psi-map",
        path(&fixture("psi.graph.json")),
        "--psi-inverse-map",
        path(&fixture("psi_inverse.graph.json")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["verdict"]["m_found"].is_number());
}
