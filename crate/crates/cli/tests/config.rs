use corrdyn::correspondence::DegreeSequence;
use corrdyn::rat;
use corrdyn_cli::config::parse_config;

const HEADER: &str = "version = 1\n\n[[factors]]\ncurve_id = \"E\"\nmultiplicity = 2\norder = { t = 0, d = 1 }\n";

fn degrees(values: &[i64]) -> DegreeSequence {
    DegreeSequence { values: values.iter().map(|&v| rat(v)).collect() }
}

#[test]
fn minimal_integer_curve() {
    let cfg = parse_config("[[factors]]\ncurve_id = \"E\"\nmultiplicity = 1\norder = \"Z\"\n").unwrap();
    assert_eq!(cfg.variety.n(), 1);
    assert!(cfg.endomorphisms.is_empty());
    assert!(cfg.correspondences.is_empty());
}

#[test]
fn gaussian_order_and_blocks() {
    let text = format!(
        "{HEADER}\n[endomorphisms.phi]\nE = [[[1, 1], 0], [0, 1]]\n\n[correspondences]\nf = \"graph(phi)\"\nff = \"power(f, 2)\"\n"
    );
    let cfg = parse_config(&text).unwrap();
    let x = &cfg.variety;
    assert_eq!(cfg.correspondences["f"].degree_sequence(x), degrees(&[2, 3, 4]));
    assert_eq!(cfg.correspondences["ff"], cfg.correspondences["f"].power(x, 2));
    assert_eq!(cfg.expressions["ff"], "power(f, 2)");
}

#[test]
fn non_imaginary_order_is_rejected_with_position() {
    let text = "[[factors]]\ncurve_id = \"E\"\nmultiplicity = 1\norder = { t = 0, d = -1 }\n";
    let err = parse_config(text).unwrap_err();
    assert_eq!(err.diagnostics.len(), 1);
    let d = &err.diagnostics[0];
    assert_eq!((d.line, d.column), (4, 9));
    assert!(d.message.contains("not imaginary quadratic"), "{}", d.message);
}

#[test]
fn unknown_curve_is_located() {
    let text = format!("{HEADER}\n[endomorphisms.phi]\nF = [[1, 0], [0, 1]]\n");
    let err = parse_config(&text).unwrap_err();
    let d = &err.diagnostics[0];
    assert_eq!(d.line, 9);
    assert!(d.message.contains("unknown curve_id 'F'"));
}

#[test]
fn malformed_block_is_located() {
    let text = format!("{HEADER}\n[endomorphisms.phi]\nE = [[1, 0]]\n");
    let err = parse_config(&text).unwrap_err();
    let d = &err.diagnostics[0];
    assert_eq!(d.line, 9);
    assert!(d.message.contains("2×2"), "{}", d.message);
}

#[test]
fn malformed_entry_is_a_syntax_error() {
    let text = format!("{HEADER}\n[endomorphisms.phi]\nE = [[\"a\", 0], [0, 1]]\n");
    let err = parse_config(&text).unwrap_err();
    assert_eq!(err.diagnostics[0].line, 9);
}

#[test]
fn integer_curve_rejects_cm_entries() {
    let text =
        "[[factors]]\ncurve_id = \"E\"\nmultiplicity = 1\norder = \"Z\"\n\n[endomorphisms]\nphi = { E = [[[1, 1]]] }\n";
    let err = parse_config(text).unwrap_err();
    assert_eq!(err.diagnostics[0].line, 7);
}

#[test]
fn toml_syntax_errors_carry_positions() {
    let err = parse_config("[[factors]\ncurve_id = \"E\"\n").unwrap_err();
    assert_eq!(err.diagnostics[0].line, 1);
    let err = parse_config("[[factors]]\ncurve_id = \"E\"\nmultiplicity = 1\n").unwrap_err();
    assert!(err.diagnostics[0].message.contains("order"), "{}", err.diagnostics[0].message);
}

#[test]
fn unsupported_version() {
    let err =
        parse_config("version = 2\n[[factors]]\ncurve_id = \"E\"\nmultiplicity = 1\norder = \"Z\"\n").unwrap_err();
    assert_eq!((err.diagnostics[0].line, err.diagnostics[0].column), (1, 11));
}

#[test]
fn expression_errors_point_into_the_string() {
    let text = format!("{HEADER}\n[correspondences]\nf = \"graph(id) +\"\n");
    let err = parse_config(&text).unwrap_err();
    let d = &err.diagnostics[0];
    assert_eq!((d.line, d.column), (9, 17));
}

#[test]
fn unknown_names_and_cycles() {
    let text = format!("{HEADER}\n[correspondences]\nf = \"graph(psi)\"\ng = \"h\"\n");
    let err = parse_config(&text).unwrap_err();
    let messages: Vec<&str> = err.diagnostics.iter().map(|d| d.message.as_str()).collect();
    assert!(messages.iter().any(|m| m.contains("unknown endomorphism 'psi'")), "{messages:?}");
    assert!(messages.iter().any(|m| m.contains("unknown correspondence 'h'")), "{messages:?}");

    let text = format!("{HEADER}\n[correspondences]\na = \"b\"\nb = \"graph(id) + a\"\n");
    let err = parse_config(&text).unwrap_err();
    assert_eq!(err.diagnostics.len(), 1);
    assert!(err.diagnostics[0].message.contains("refers to itself"));
}

#[test]
fn duplicate_curves_and_non_isogeny_transpose() {
    let text = format!("{HEADER}\n[[factors]]\ncurve_id = \"E\"\nmultiplicity = 1\norder = \"Z\"\n");
    assert!(parse_config(&text).unwrap_err().diagnostics[0].message.contains("twice"));
    let text = format!("{HEADER}\n[correspondences]\nf = \"transpose(graph(mult(0)))\"\n");
    assert!(parse_config(&text).is_err());
}

#[test]
fn digest_tracks_the_text() {
    let a = parse_config(HEADER).unwrap();
    let b = parse_config(&format!("{HEADER}# comment\n")).unwrap();
    assert_ne!(a.digest, b.digest);
    assert_eq!(a.digest, parse_config(HEADER).unwrap().digest);
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = std::fs::read_to_string(&path).unwrap();
            parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 5);
}
