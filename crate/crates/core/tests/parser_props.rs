use std::path::PathBuf;

use eventb_fdr::model::{validate_machine, BinOp, Expr};
use eventb_fdr::oracle::{generate_sources, RandomMachineSpec};
use eventb_fdr::parser::{parse_expr, parse_machine, pretty_print, print_expr};
use proptest::prelude::*;

fn corpus_files() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "ebm"))
        .collect();
    files.sort();
    files
}

#[test]
fn corpus_round_trips_and_validates() {
    let files = corpus_files();
    assert!(files.len() >= 9, "corpus incomplete: {files:?}");
    for f in files {
        let m = eventb_fdr::load(&f).unwrap();
        assert!(validate_machine(&m).is_empty(), "{}", f.display());
        let again = parse_machine(&pretty_print(&m)).unwrap();
        assert_eq!(again, m, "{}", f.display());
        let names: Vec<_> = again.events.iter().map(|e| &e.name).collect();
        let original: Vec<_> = m.events.iter().map(|e| &e.name).collect();
        assert_eq!(names, original);
    }
}

#[test]
fn listing_machines_parse_as_expected() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let m0 = eventb_fdr::load(dir.join("vending_m0.ebm")).unwrap();
    let events: Vec<_> = m0.events.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(events, ["insert_coin", "vend", "restock"]);
    let adet = eventb_fdr::load(dir.join("listing_adet.ebm")).unwrap();
    let a = adet.event("a").unwrap();
    assert_eq!(a.params.len(), 1);
    assert_eq!(a.params[0].name, "npc");
}

#[test]
fn printing_is_idempotent() {
    for f in corpus_files() {
        let m = eventb_fdr::load(&f).unwrap();
        let once = pretty_print(&m);
        assert_eq!(pretty_print(&parse_machine(&once).unwrap()), once);
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..50).prop_map(Expr::Int),
        any::<bool>().prop_map(Expr::Bool),
        prop::sample::select(vec!["x", "y", "pc", "coin"]).prop_map(Expr::name),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        let ops = prop::sample::select(vec![
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Eq,
            BinOp::Ne,
            BinOp::Lt,
            BinOp::Le,
            BinOp::Gt,
            BinOp::Ge,
            BinOp::And,
            BinOp::Or,
            BinOp::Implies,
        ]);
        prop_oneof![
            (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::bin(op, l, r)),
            inner.clone().prop_map(Expr::not),
            (inner, prop::collection::vec((0i64..9).prop_map(Expr::Int), 1..4))
                .prop_map(|(e, items)| Expr::In(Box::new(e), items)),
        ]
    })
}

proptest! {
    #[test]
    fn expressions_round_trip(e in expr()) {
        let text = print_expr(&e);
        prop_assert_eq!(parse_expr(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn generated_machines_round_trip(seed in any::<u64>()) {
        let (a, c) = generate_sources(&RandomMachineSpec::from_seed(seed));
        for src in [a, c] {
            let m = parse_machine(&src).unwrap();
            prop_assert_eq!(parse_machine(&pretty_print(&m)).unwrap(), m);
        }
    }

    #[test]
    fn parsing_is_total_and_errors_point_inside(text in "\\PC{0,200}") {
        if let Err(e) = parse_machine(&text) {
            let lines: Vec<&str> = text.split('\n').collect();
            prop_assert!(e.span.line >= 1 && e.span.line <= lines.len().max(1));
            prop_assert!(e.span.column >= 1);
            prop_assert!(e.span.column <= lines[e.span.line - 1].chars().count() + 1);
        }
    }

    #[test]
    fn mangled_machines_never_panic(seed in any::<u64>(), cut in 0usize..2000, junk in "[a-z:=;{}()/\\\\. ]{0,6}") {
        let (src, _) = generate_sources(&RandomMachineSpec::from_seed(seed));
        let at = src.char_indices().map(|(i, _)| i).nth(cut % src.chars().count()).unwrap_or(0);
        let mangled = format!("{}{}{}", &src[..at], junk, &src[at..]);
        let _ = parse_machine(&mangled);
    }
}
