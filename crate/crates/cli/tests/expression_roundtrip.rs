use std::sync::Arc;

use proptest::prelude::*;
use qclass_cli::parse_expression;
use qclass_core::random::{random_poly, rng, PolyShape};
use qclass_core::{rational, Chart, Parity, SuperPolynomial};

fn chart() -> Arc<Chart> {
    Chart::new([
        ("x", Parity::Even),
        ("y", Parity::Even),
        ("t1", Parity::Odd),
        ("t2", Parity::Odd),
        ("t3", Parity::Odd),
    ])
    .unwrap()
}

/// Expression trees whose value is computed directly with the algebra
/// operations; the parser must agree with this evaluation.
#[derive(Clone, Debug)]
enum Ast {
    Num(i64, i64),
    Var(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    /// Only generated over even subtrees.
    Pow(Box<Ast>, u32),
}

impl Ast {
    fn eval(&self, c: &Arc<Chart>) -> SuperPolynomial {
        match self {
            Ast::Num(n, d) => SuperPolynomial::constant(c, rational(*n, *d)),
            Ast::Var(i) => SuperPolynomial::coordinate(c, *i).unwrap(),
            Ast::Add(a, b) => &a.eval(c) + &b.eval(c),
            Ast::Sub(a, b) => &a.eval(c) - &b.eval(c),
            Ast::Mul(a, b) => &a.eval(c) * &b.eval(c),
            Ast::Pow(a, n) => {
                let base = a.eval(c);
                (0..*n).fold(SuperPolynomial::one(c), |acc, _| &acc * &base)
            }
        }
    }

    fn render(&self, c: &Chart) -> String {
        match self {
            Ast::Num(n, d) if *d == 1 => format!("({n})"),
            Ast::Num(n, d) => format!("({n}/{d})"),
            Ast::Var(i) => c.name(*i).to_string(),
            Ast::Add(a, b) => format!("({} + {})", a.render(c), b.render(c)),
            Ast::Sub(a, b) => format!("({} - {})", a.render(c), b.render(c)),
            Ast::Mul(a, b) => format!("{} * {}", a.render(c), b.render(c)),
            Ast::Pow(a, n) => format!("({})^{n}", a.render(c)),
        }
    }
}

fn even_leaf() -> impl Strategy<Value = Ast> {
    prop_oneof![
        (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Ast::Num(n, d)),
        (0usize..2).prop_map(Ast::Var),
    ]
}

fn even_ast() -> impl Strategy<Value = Ast> {
    even_leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Mul(Box::new(a), Box::new(b))),
            (inner, 0u32..3).prop_map(|(a, n)| Ast::Pow(Box::new(a), n)),
        ]
    })
}

fn any_ast() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![even_ast(), (2usize..5).prop_map(Ast::Var)];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Ast::Mul(Box::new(a), Box::new(b))),
        ]
    })
}

proptest! {
    #[test]
    fn parser_agrees_with_direct_evaluation(ast in any_ast()) {
        let c = chart();
        let src = ast.render(&c);
        let parsed = parse_expression(&src, &c).map_err(|e| TestCaseError::fail(format!("{src}: {e}")))?;
        prop_assert_eq!(&parsed, &ast.eval(&c));
        let printed = parsed.to_string();
        prop_assert_eq!(parse_expression(&printed, &c).unwrap(), parsed);
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), odd in any::<bool>(), degree in 0usize..5) {
        let c = chart();
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let shape = PolyShape { max_degree: degree, max_terms: 6, coeff_range: 9 };
        let mut r = rng(seed);
        let p = random_poly(&mut r, &c, parity, shape);
        let q = random_poly(&mut r, &c, parity, shape).scale(&rational(1, 7));
        let p = &p + &q;
        let printed = p.to_string();
        let back = parse_expression(&printed, &c).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn whitespace_is_insignificant(ast in any_ast()) {
        let c = chart();
        let src = ast.render(&c);
        let spaced = src.replace('*', " \n * ").replace('(', "( ");
        prop_assert_eq!(parse_expression(&spaced, &c).unwrap(), parse_expression(&src, &c).unwrap());
    }
}

#[test]
fn odd_powers_are_rejected_everywhere() {
    let c = chart();
    for src in ["t1^2", "(t1 + x*t2)^2", "x + (t1*t2*t3)^3"] {
        let e = parse_expression(src, &c).unwrap_err();
        assert!(e.message.contains("not even"), "{src}: {e}");
    }
    assert!(parse_expression("(t1*t2)^3", &c).unwrap().is_zero());
}
