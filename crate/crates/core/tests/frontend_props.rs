use assertgen_core::sva::gen::{AstGen, GenConfig};
use assertgen_core::sva::{parse_assertion, pretty_print, render_diagnostic};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(depth: u32) -> GenConfig {
    let mut cfg = GenConfig::new(["a", "b", "req", "gnt", "state", "top.u0.sig"].map(String::from).to_vec());
    cfg.max_depth = depth;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn round_trip_generated_trees(seed in any::<u64>(), depth in 0u32..6) {
        let cfg = config(depth);
        let mut g = AstGen::new(&cfg, ChaCha8Rng::seed_from_u64(seed));
        let decl = g.assertion();
        let text = pretty_print(&decl);
        let parsed = parse_assertion(&text).map_err(|d| TestCaseError::fail(format!("{text}: {d:?}")))?;
        prop_assert!(decl.structurally_eq(&parsed), "{}", text);
        prop_assert_eq!(pretty_print(&parsed), text);
    }

    #[test]
    fn parser_is_total_and_local(src in "\\PC{0,80}") {
        match parse_assertion(&src) {
            Ok(d) => prop_assert_eq!(d.raw_text, src),
            Err(diags) => {
                prop_assert!(!diags.is_empty());
                for d in &diags {
                    prop_assert!(d.span.end <= src.len());
                    prop_assert_eq!(&src[d.span.start..d.span.end], d.quoted_fragment.as_str());
                    let quoted = format!("«{}»", d.quoted_fragment);
                    prop_assert!(d.message.contains(&quoted));
                    let rendered = render_diagnostic(d, &src);
                    prop_assert!(!rendered.contains("th word"));
                }
            }
        }
    }

    #[test]
    fn parser_is_total_on_assertion_shaped_noise(
        body in "[a-z_()|\\-=>#\\[\\]:;!&0-9' @$.]{0,60}"
    ) {
        let src = format!("assert property (@(posedge clk) {body}");
        let first = parse_assertion(&src);
        let second = parse_assertion(&src);
        prop_assert_eq!(format!("{first:?}"), format!("{second:?}"));
    }
}
