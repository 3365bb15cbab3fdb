use exemplar_core::builders::{coauthor_relation, hausdorff_relation, BinaryImage, PublicationRecord};
use exemplar_core::network::{build_network, NeighborhoodSpec};
use exemplar_core::scoring::{aggregated_scores, rank_table, TiePolicy};
use proptest::prelude::*;

fn arb_image(label: String) -> impl Strategy<Value = BinaryImage> {
    prop::collection::vec((0u32..5, 0u32..5), 1..8)
        .prop_map(move |px| BinaryImage::new(label.clone(), 5, 5, px).unwrap())
}

fn arb_corpus() -> impl Strategy<Value = Vec<PublicationRecord>> {
    prop::collection::vec(prop::sample::subsequence((0..8).collect::<Vec<u32>>(), 1..4), 1..20).prop_map(|pubs| {
        pubs.into_iter()
            .enumerate()
            .map(|(i, authors)| PublicationRecord {
                id: format!("p{i}"),
                authors: authors.into_iter().map(|a| format!("a{a}")).collect(),
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hausdorff_zero_iff_subset(a in arb_image("a".into()), b in arb_image("b".into())) {
        let m = hausdorff_relation(&[a.clone(), b.clone()]).unwrap();
        let subset = a.foreground().iter().all(|p| b.foreground().contains(p));
        prop_assert_eq!(m.get(0, 1) == 0.0, subset);
    }

    #[test]
    fn coauthor_structure(pubs in arb_corpus()) {
        let co = coauthor_relation(&pubs).unwrap();
        let n = co.labels().len();
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                let adjacent = co.adjacency.neighbors(a).contains(&b);
                prop_assert_eq!(co.affinity(a, b) > 0, adjacent);
                prop_assert_eq!(adjacent, co.adjacency.neighbors(b).contains(&a));
                for c in (0..n).filter(|&c| c != a && co.affinity(a, c) > 0) {
                    if adjacent && co.affinity(a, b) > co.affinity(a, c) {
                        prop_assert!(co.relation.get(a, b) < co.relation.get(a, c));
                    }
                }
                if !adjacent {
                    let sentinel = co.relation.get(a, b);
                    prop_assert!(co.adjacency.neighbors(a).iter().all(|&c| co.relation.get(a, c) < sentinel));
                }
            }
        }
        // graph-neighborhood network over the co-author adjacency
        let rk = rank_table(&co.relation, TiePolicy::MidRank);
        let sv = aggregated_scores(&rk);
        let net = build_network(&sv, &rk, &NeighborhoodSpec::Graph(co.adjacency.clone())).unwrap();
        for x in 0..n {
            let y = net.link(x);
            prop_assert!(y == x || co.adjacency.neighbors(x).contains(&y));
            if y != x {
                prop_assert!(sv.get(y) > sv.get(x));
            }
        }
    }
}
