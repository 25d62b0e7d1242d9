use aru_layout::classify::{aru_class, is_one_sided, is_sliceable, slicing_tree, AruClass};
use aru_layout::dualgraph::{dual, plane_isomorphic};
use aru_layout::enumerate::{random_instance, random_tree};
use aru_layout::geometry::{format_rational, parse_rational, rat};
use aru_layout::realize::{ratios_match, realize_sliceable, strong_realizability, AspectAssignment, Mode};
use aru_layout::recognize::{recognize_dual, verify_realization, Instance};
use aru_layout::render::{render_svg, RenderOptions};
use aru_layout::transversal::transversal_of;
use aru_layout::Layout;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generic random sliceable layout with `n` rects, drawn from `seed`.
fn layout(n: usize, seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_tree(n, &mut rng);
    loop {
        let l = random_instance(&t, &mut rng);
        if l.is_generic() {
            return l;
        }
    }
}

fn assignment(l: &Layout, seed: u64) -> AspectAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AspectAssignment::new(l.ids().map(|id| (id.to_string(), rat(rng.gen_range(1..=50), rng.gen_range(1..=50)))).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_roundtrip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn layout_json_roundtrip(n in 1usize..=9, seed in any::<u64>()) {
        let l = layout(n, seed);
        let back = Layout::from_json_str(&l.to_json().to_string()).unwrap();
        prop_assert_eq!(back, l);
    }

    #[test]
    fn realization_hits_every_ratio(n in 1usize..=9, seed in any::<u64>()) {
        let l = layout(n, seed);
        let t = slicing_tree(&l).unwrap();
        let a = assignment(&l, seed ^ 0x5eed);
        let out = realize_sliceable(&t, &a).unwrap();
        prop_assert!(ratios_match(&out, &a));
        prop_assert_eq!(slicing_tree(&out).map(|t| t.len()), Some(n));
    }

    #[test]
    fn one_sided_is_strongly_realizable(n in 1usize..=9, seed in any::<u64>()) {
        let l = layout(n, seed);
        let a = assignment(&l, seed.rotate_left(7));
        let r = strong_realizability(&l, &a, Mode::Strong).unwrap();
        if is_one_sided(&l).one_sided {
            prop_assert!(r.equivalent);
            prop_assert!(r.contact_diffs.is_empty());
        }
        prop_assert!(ratios_match(&r.layout, &a));
        prop_assert!(strong_realizability(&l, &a, Mode::Weak).unwrap().equivalent);
    }

    #[test]
    fn class_matches_predicates(n in 1usize..=9, seed in any::<u64>()) {
        let l = layout(n, seed);
        prop_assert!(is_sliceable(&l));
        let expect = if is_one_sided(&l).one_sided { AruClass::StronglyAru } else { AruClass::WeaklyAruOnly };
        prop_assert_eq!(aru_class(&l), expect);
    }

    #[test]
    fn transversal_structure_is_valid(n in 1usize..=9, seed in any::<u64>()) {
        let l = layout(n, seed);
        prop_assert!(transversal_of(&l).unwrap().validate().is_ok());
    }

    #[test]
    fn recognizer_rebuilds_one_sided_duals(n in 1usize..=9, seed in any::<u64>()) {
        let l = layout(n, seed);
        prop_assume!(is_one_sided(&l).one_sided);
        let g = dual(&l).unwrap();
        let found = recognize_dual(&g).unwrap().expect("one-sided dual is recognized");
        prop_assert!(verify_realization(&found, &Instance::initial(g.clone()).unwrap()).ok);
        prop_assert!(is_one_sided(&found.layout).one_sided);
        prop_assert!(is_sliceable(&found.layout));
        let back = dual(&found.layout).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.edge_count(), g.edge_count());
        for (a, b) in g.edge_set() {
            prop_assert!(back.has_edge(&found.vertex_map[&a], &found.vertex_map[&b]));
        }
        prop_assert!(plane_isomorphic(&back, &g).unwrap());
    }

    #[test]
    fn render_counts_elements(n in 1usize..=9, seed in any::<u64>(), width in 64u32..2048) {
        let l = layout(n, seed);
        let svg = render_svg(&l, &RenderOptions { width_px: width, ..Default::default() }).unwrap();
        prop_assert_eq!(svg.matches("<rect ").count(), n);
        prop_assert_eq!(svg.matches("<line ").count(), 0);
    }
}
