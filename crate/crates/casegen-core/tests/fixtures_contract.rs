//! The shipped demo fixture must satisfy the documented interface
//! contracts: component counts, dependency lookups and store queries.

mod common;

use casegen_core::ids::{ComponentId, EntryId, ModeId};

#[test]
fn model_has_fourteen_components_and_five_functions() {
    let fx = common::load_aebs();
    assert_eq!(fx.model.components().count(), 14);
    assert_eq!(fx.model.functions().count(), 5);
    for component in fx.model.components() {
        assert!(!component.provides.is_empty());
    }
}

#[test]
fn braking_manager_inputs_differ_per_mode() {
    let fx = common::load_aebs();
    let bm = ComponentId::new("braking-manager");
    let mode2 = fx
        .model
        .required_inputs(&bm, &ModeId::new("mode2"))
        .unwrap();
    assert_eq!(
        mode2,
        vec![
            ComponentId::new("current-position"),
            ComponentId::new("ir-optocoupler"),
            ComponentId::new("obstacle-distance"),
            ComponentId::new("slip-status"),
        ]
    );
    let mode1 = fx
        .model
        .required_inputs(&bm, &ModeId::new("mode1"))
        .unwrap();
    assert_eq!(
        mode1,
        vec![
            ComponentId::new("ir-optocoupler"),
            ComponentId::new("obstacle-distance"),
            ComponentId::new("slip-status"),
        ]
    );
}

#[test]
fn camera_is_a_leaf() {
    let fx = common::load_aebs();
    let inputs = fx
        .model
        .required_inputs(&ComponentId::new("camera"), &ModeId::new("mode1"))
        .unwrap();
    assert!(inputs.is_empty());
}

#[test]
fn store_has_fourteen_rows_and_queries_by_component() {
    let fx = common::load_aebs();
    assert_eq!(fx.store.entries().count(), 14);
    let mode = ModeId::new("mode1");
    let lidar = fx.store.query(&ComponentId::new("lidar"), &mode);
    assert_eq!(lidar.len(), 1);
    assert_eq!(lidar[0].id, EntryId::new("G2"));
    let distance = fx
        .store
        .query(&ComponentId::new("obstacle-distance"), &mode);
    assert_eq!(distance.len(), 1);
    assert_eq!(distance[0].id, EntryId::new("G8"));
}

#[test]
fn claim_declares_two_active_modes_and_three_targets() {
    let fx = common::load_aebs();
    assert_eq!(fx.spec.modes.len(), 4);
    let active: Vec<&str> = fx
        .spec
        .active_modes()
        .iter()
        .map(|m| m.id.as_str())
        .collect();
    assert_eq!(active, vec!["mode1", "mode2"]);
    assert_eq!(fx.spec.claim.target_components.len(), 3);
    let printed = casegen_core::claim::predicate_text(&fx.spec.claim.predicate);
    assert_eq!(printed, "(obj == 1) -> (d_t >= d_min)");
}
