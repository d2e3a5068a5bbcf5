use std::sync::OnceLock;

use proptest::prelude::*;

use simplexk::kb::KnowledgeBase;
use simplexk::nil::{measure, DerivationStep, NilEngine, RuleId};
use simplexk::{AbGroup, GroupId, KExpr, KSymbol};

fn kb() -> &'static KnowledgeBase {
    static KB: OnceLock<KnowledgeBase> = OnceLock::new();
    KB.get_or_init(KnowledgeBase::bundled)
}

fn kb_groups() -> Vec<GroupId> {
    let mut g: Vec<GroupId> = kb().entries.iter().map(|e| e.group.clone()).collect();
    g.sort();
    g.dedup();
    g
}

fn finite_kb_groups() -> Vec<GroupId> {
    kb_groups().into_iter().filter(GroupId::is_finite).collect()
}

/// The symbols arising for [3,4,4], plus low-degree terms that every
/// vanishing rule must dispose of.
fn in_scope_symbol() -> impl Strategy<Value = KSymbol> {
    let d2 = GroupId::Dihedral(2);
    let d3 = GroupId::Dihedral(3);
    let wald = prop::sample::select(vec![(d2.clone(), "B"), (d3.clone(), "C")]).prop_flat_map(|(base, tag)| {
        (0..=1i32).prop_map(move |i| KSymbol::WaldNil { i, base: base.clone(), tag: tag.into() })
    });
    let bass = (0..=1i32, prop::sample::select(vec![GroupId::C2, d2, d3]))
        .prop_map(|(i, ring)| KSymbol::BassNil { i, ring });
    let bass_low = (-3..=-2i32, prop::sample::select(finite_kb_groups()))
        .prop_map(|(i, ring)| KSymbol::BassNil { i, ring });
    let madsen = (1..=2i32).prop_map(|i| KSymbol::NkFiniteField { i, field_order: 2, group: GroupId::C2 });
    let wh_low = (-3..=-2i32, prop::sample::select(kb_groups())).prop_map(|(q, group)| KSymbol::WhQ { q, group });
    let wh_vc = (
        0..=1i32,
        prop::sample::select(vec![
            GroupId::product_with_dinf(GroupId::Dihedral(2)),
            GroupId::product_with_dinf(GroupId::Dihedral(3)),
            GroupId::ZxC2,
        ]),
    )
        .prop_map(|(q, group)| KSymbol::WhQ { q, group });
    prop_oneof![wald, bass, bass_low, madsen, wh_low, wh_vc]
}

fn expr() -> impl Strategy<Value = KExpr> {
    prop::collection::vec(in_scope_symbol(), 1..5).prop_map(|s| KExpr::new(AbGroup::zero(), s))
}

fn check_measure(log: &[DerivationStep]) -> Result<(), TestCaseError> {
    for step in log {
        prop_assert!(
            measure(&step.output) < measure(&step.input),
            "{} did not decrease {:?} -> {:?}",
            step.rule,
            measure(&step.input),
            measure(&step.output)
        );
        for p in &step.premises {
            check_measure(&p.derivation)?;
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn resolution_terminates_with_decreasing_measure(e in expr()) {
        let r = NilEngine::new(Some(kb())).resolve(&e).unwrap();
        prop_assert!(r.log.len() <= 4 * e.symbols().len() + 4);
        check_measure(&r.log)?;
    }

    #[test]
    fn replay_reproduces_the_value(e in expr()) {
        let engine = NilEngine::new(Some(kb()));
        let r = engine.resolve(&e).unwrap();
        let end = engine.replay(&e, &r.log).unwrap();
        prop_assert_eq!(end, KExpr::from_group(r.value));
    }

    #[test]
    fn result_is_independent_of_rule_order(
        e in expr(),
        order in Just(RuleId::ALL.to_vec()).prop_shuffle(),
    ) {
        let default = NilEngine::new(Some(kb())).resolve(&e).unwrap().value;
        let shuffled = NilEngine::new(Some(kb())).with_order(order).resolve(&e).unwrap().value;
        prop_assert_eq!(shuffled, default);
    }

    #[test]
    fn tampered_logs_fail_replay(e in expr(), idx in any::<prop::sample::Index>()) {
        let engine = NilEngine::new(Some(kb()));
        let mut log = engine.resolve(&e).unwrap().log;
        prop_assume!(!log.is_empty());
        let i = idx.index(log.len());
        log[i].output = log[i].output.direct_sum(&KExpr::from_group(AbGroup::free(1)));
        prop_assert!(engine.replay(&e, &log).is_err());
    }
}

#[test]
fn every_rule_order_agrees_on_the_waldhausen_nils() {
    let symbols = [
        (GroupId::Dihedral(2), "B", AbGroup::omega(2).unwrap()),
        (GroupId::Dihedral(3), "C", AbGroup::zero()),
    ];
    // All rotations and the reversal of the default order.
    let mut orders: Vec<Vec<RuleId>> = (0..10)
        .map(|k| {
            let mut o = RuleId::ALL.to_vec();
            o.rotate_left(k);
            o
        })
        .collect();
    orders.push(RuleId::ALL.iter().rev().copied().collect());
    for (base, tag, expected) in symbols {
        for i in [0, 1] {
            let s = KSymbol::WaldNil { i, base: base.clone(), tag: tag.into() };
            for o in &orders {
                let r = NilEngine::new(Some(kb())).with_order(o.clone()).resolve_symbol(s.clone()).unwrap();
                assert_eq!(r.value, expected, "{s} under {o:?}");
            }
        }
    }
}
