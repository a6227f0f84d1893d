mod common;

use minisol_iv::frontend::{load, parse, pretty::print_unit, tokenize};
use minisol_iv::Error;

fn reparse(source: &str) -> String {
    print_unit(&parse(&tokenize(source).unwrap()).unwrap())
}

#[test]
fn printing_is_a_fixpoint_on_every_fixture() {
    for path in common::all_fixture_files() {
        let once = reparse(&common::read(&path));
        assert_eq!(reparse(&once), once, "{}", path.display());
        load(&once).unwrap_or_else(|e| panic!("{}: printed form fails to load: {e}", path.display()));
    }
}

#[test]
fn every_fixture_resolves() {
    for path in common::all_fixture_files() {
        let (unit, symbols) = load(&common::read(&path)).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!unit.contracts.is_empty() || path.ends_with("empty.sol"));
        assert!(symbols.typed_expr_count() > 0 || path.ends_with("empty.sol"));
    }
}

#[test]
fn token_spans_point_at_their_text() {
    let src = common::read(&common::fixtures().join("corpus/tautology.sol"));
    let lines: Vec<&str> = src.lines().collect();
    for t in tokenize(&src).unwrap() {
        if t.span.start == t.span.end {
            continue;
        }
        let line = lines[t.span.line as usize - 1];
        let col = t.span.column as usize - 1;
        assert!(line[col..].starts_with(&src[t.span.start..t.span.end]), "{t:?}");
    }
}

fn error(src: &str) -> Error {
    load(src).expect_err(src)
}

#[test]
fn errors_carry_kind_and_position() {
    let e = error("contract C {\n  uint x = 1 @ 2;\n}");
    assert!(matches!(e, Error::Lex { .. }), "{e}");
    assert_eq!((e.span().unwrap().line, e.span().unwrap().column), (2, 14));

    let e = error("contract C { function f() public { uint x = ; } }");
    assert!(matches!(e, Error::Parse { .. }), "{e}");

    let e = error("contract C { function f(uint8 a) public { uint16 b = uint16(a); } }");
    assert!(matches!(e, Error::Unsupported { .. }), "{e}");

    let e = error("contract C { function f() public { y = 1; } }");
    assert!(matches!(e, Error::Resolve { .. }), "{e}");

    let e = error("contract C { function f(bool b) public { uint x = b + 1; } }");
    assert!(matches!(e, Error::Type { .. }), "{e}");
}

#[test]
fn unsupported_constructs_are_named() {
    for (src, word) in [
        ("contract C { function f() public { string memory s; } }", "string"),
        ("contract C { function f(uint a) public {} function f(bool b) public {} }", "overloading"),
        ("contract C { function f() public view returns (uint) { return msg.gas; } }", "msg.gas"),
        ("contract C { function f(uint n) public { while (n > 0) { break; } } }", "break"),
    ] {
        let e = error(src);
        assert!(matches!(e, Error::Unsupported { .. }) && e.to_string().contains(word), "{src}: {e}");
    }
}
