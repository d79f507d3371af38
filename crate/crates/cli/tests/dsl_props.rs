use proptest::prelude::*;

use thetahat_cli::dsl::{parse_expr, parse_form, render_expr, render_form};
use thetahat_cli::manifest::parse_manifest;
use thetahat_core::forms::Form;
use thetahat_core::symkernel::{Expr, FuncSym, GaussRat, VarId};
use thetahat_core::Error;

const N: usize = 3;

fn var() -> impl Strategy<Value = VarId> {
    prop_oneof![
        (1..=N).prop_map(VarId::x),
        (1..=N, 1..=N, 1..=N).prop_map(|(k, i, j)| VarId::gamma(k, i, j)),
    ]
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-9i64..=9, 1i64..=6, -4i64..=4, 1i64..=6).prop_map(|(a, b, c, d)| {
            let re = GaussRat::from_ratio(a, b);
            let im = &GaussRat::from_ratio(c, d) * &GaussRat::imag_unit();
            Expr::gauss(&re + &im)
        }),
        (-3i32..=3).prop_map(|e| Expr::pi().pow(e).unwrap()),
        var().prop_map(Expr::var),
        (prop::sample::select(vec!["f", "g", "phi"]), prop::collection::vec(var(), 1..=3), 0usize..=2)
            .prop_map(|(name, mut args, np)| {
                args.sort();
                args.dedup();
                let partials = args.iter().cycle().take(np).cloned().collect();
                Expr::func(FuncSym::with_partials(name, args, partials))
            }),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(&b).unwrap_or(a)),
            (inner, -2i32..=3).prop_map(|(a, e)| a.pow(e).unwrap_or(a)),
        ]
    })
}

fn form() -> impl Strategy<Value = Form> {
    let term = (prop::collection::vec(var(), 0..=3), expr()).prop_map(|(vars, c)| {
        let mut gens = vars;
        gens.sort();
        gens.dedup();
        Form::term(N, &gens, c)
    });
    prop::collection::vec(term, 0..=3)
        .prop_map(|ts| ts.into_iter().fold(Form::zero(N), |acc, t| acc.add(&t).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expressions_round_trip(e in expr()) {
        let text = render_expr(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(render_expr(&back), text);
    }

    #[test]
    fn forms_round_trip(f in form()) {
        let text = render_form(&f);
        let back = parse_form(&text, N).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(&back, &f, "{}", text);
    }

    #[test]
    fn manifest_parser_never_panics(text in "[\\[\\]a-zGx0-9=+*^/() .#{}\n-]{0,200}") {
        match parse_manifest(&text) {
            Ok(_) => {}
            Err(Error::Parse { line, column, .. }) => {
                prop_assert!(line >= 1 && column >= 1);
                prop_assert!(line <= text.lines().count().max(1) + 1);
            }
            Err(other) => prop_assert!(false, "non-positional error {other:?}"),
        }
    }

    #[test]
    fn manifest_lines_with_noise_report_their_line(noise in "[=+*^/()G\\[\\]]{1,6}", at in 0usize..4) {
        let mut lines = vec!["[chart]", "n = 2", "[connection]", "Gamma[1][1][2] = x1", "Gamma[2][2][2] = x2^2"];
        let bad = format!("Gamma[1][2][2] = x1 {noise} x2");
        let pos = 3 + at.min(2);
        lines.insert(pos, &bad);
        let text = lines.join("\n");
        if let Err(e) = parse_manifest(&text) {
            match e {
                Error::Parse { line, .. } => prop_assert_eq!(line, pos + 1),
                other => prop_assert!(false, "{other:?}"),
            }
        }
    }
}
