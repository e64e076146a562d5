//! The run-file schema must reject malformed input loudly: every error here
//! is one a user could plausibly hit with a typo or a half-edited file.

use hvmc::config::{assemble, Overrides};
use hvmc::presets::{preset_toml, PRESET_NAMES};

fn no_overrides() -> Overrides {
    Overrides::default()
}

/// A minimal valid run file the failure cases below mutate.
const BASE: &str = r#"
[hamiltonian]
kind = "afh"
n = 3

[model.transformer]
embed_dim = 4
n_heads = 2
n_blocks = 1

[model.phase_net]
hidden = [8]

[sampling]
batch = 100
shots = "exact"

[optimizer]
method = "sr"
eta_init = 5e-2
eta_min = 5e-3
sr_epsilon = 1e-3

[[schedule]]
blocks = ["transformer", "phase_net"]
iters = 10

[run]
iters = 10
seed = 1
"#;

#[test]
fn base_config_assembles() {
    let a = assemble(BASE, &no_overrides()).unwrap();
    assert_eq!(a.engine.seed, 1);
    assert_eq!(a.plan.iters, 10);
    // 3-qubit chain: oracle energy available, recorded for error columns.
    let e = a.engine.reference_energy.unwrap();
    assert!((e - -4.0).abs() < 1e-8, "AFH3 open ground energy, got {e}");
}

#[test]
fn every_preset_assembles_or_asks_for_a_file() {
    for name in PRESET_NAMES {
        let text = preset_toml(name).unwrap();
        match assemble(text, &no_overrides()) {
            Ok(a) => {
                assert!(a.plan.iters > 0, "{name}: empty plan");
            }
            Err(e) => {
                // Only the molecular preset lacks a bundled operator.
                assert_eq!(name, "fig5-lih", "{name} failed to assemble: {e:#}");
                assert!(
                    format!("{e:#}").contains("--hamiltonian"),
                    "fig5-lih error should point at the override: {e:#}"
                );
            }
        }
    }
}

#[test]
fn preset_circuit_parameter_counts_are_pinned() {
    // Shared-angle four-layer circuits: 2·6·4 + 6 + 6 = 60 on six qubits,
    // 2·7·4 + 7 + 7 = 70 on seven.
    let lih = assemble(
        preset_toml("fig5-lih").unwrap(),
        &Overrides {
            hamiltonian: Some(write_fixture()),
            ..Overrides::default()
        },
    )
    .unwrap();
    let total = lih.engine.model.param_count();
    let transformer = lih.engine.model.transformer.param_count();
    let phase = lih.engine.model.phase_net.param_count();
    assert_eq!(transformer, 179);
    assert_eq!(phase, 256);
    assert_eq!(total - transformer - phase, 60);

    let afh7 = assemble(preset_toml("fig6-afh7").unwrap(), &no_overrides()).unwrap();
    let total = afh7.engine.model.param_count();
    let transformer = afh7.engine.model.transformer.param_count();
    let phase = afh7.engine.model.phase_net.param_count();
    assert_eq!(transformer, 290);
    assert_eq!(phase, 272);
    assert_eq!(total - transformer - phase, 70);
}

/// A 6-qubit stand-in operator so the molecular preset can assemble.
fn write_fixture() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("hvmc-config-validation");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("six-qubit.txt");
    std::fs::write(&path, "nqubits 6\n-1.0 ZIIIII\n0.5 IZIIII\n0.25 XXIIII\n").unwrap();
    path
}

fn rejects(text: &str, needle: &str) {
    match assemble(text, &no_overrides()) {
        Ok(_) => panic!("expected rejection mentioning {needle:?}"),
        Err(e) => {
            let msg = format!("{e:#}");
            assert!(
                msg.to_lowercase().contains(&needle.to_lowercase()),
                "error should mention {needle:?}, got: {msg}"
            );
        }
    }
}

#[test]
fn unknown_keys_are_errors() {
    rejects(&format!("{BASE}\n[extra]\nx = 1\n"), "unknown");
    rejects(&BASE.replace("batch = 100", "batch = 100\nbatchez = 3"), "unknown");
}

#[test]
fn single_sample_batches_are_rejected() {
    rejects(&BASE.replace("batch = 100", "batch = 1"), "batch");
}

#[test]
fn shot_keyword_other_than_exact_is_rejected() {
    rejects(
        &BASE.replace("shots = \"exact\"", "shots = \"lots\""),
        "exact",
    );
    rejects(&BASE.replace("shots = \"exact\"", "shots = 0"), "positive");
}

#[test]
fn run_longer_than_schedule_is_rejected() {
    rejects(&BASE.replace("iters = 10\nseed = 1", "iters = 11\nseed = 1"), "schedule");
}

#[test]
fn bad_block_names_are_rejected() {
    rejects(
        &BASE.replace("\"transformer\", \"phase_net\"", "\"transformer\", \"phase_nett\""),
        "unknown block",
    );
    rejects(
        &BASE.replace("\"transformer\", \"phase_net\"", "\"phase_net\", \"phase_net\""),
        "twice",
    );
    // Circuit blocks in the schedule require a circuit in the model.
    rejects(
        &BASE.replace("\"transformer\", \"phase_net\"", "\"transformer\", \"amp_circuit\""),
        "circuit",
    );
}

#[test]
fn mask_requires_even_register() {
    rejects(
        &BASE.replace("[sampling]", "[model.mask]\nn_up = 1\nn_down = 1\n\n[sampling]"),
        "even",
    );
}

#[test]
fn optimizer_fields_must_match_method() {
    rejects(&BASE.replace("sr_epsilon = 1e-3", ""), "sr_epsilon");
    rejects(
        &BASE.replace("sr_epsilon = 1e-3", "sr_epsilon = 1e-3\nadam_beta1 = 0.9"),
        "adam_beta1",
    );
    rejects(
        &BASE.replace(
            "method = \"sr\"\neta_init = 5e-2\neta_min = 5e-3\nsr_epsilon = 1e-3",
            "method = \"adam\"\neta_init = 5e-3\neta_min = 5e-4\nadam_beta1 = 0.9",
        ),
        "adam_beta2",
    );
}

#[test]
fn hamiltonian_section_is_cross_checked() {
    rejects(&BASE.replace("n = 3", "path = \"nowhere.txt\""), "requires `n`");
    rejects(
        &BASE.replace("kind = \"afh\"\nn = 3", "kind = \"pauli-file\""),
        "--hamiltonian",
    );
    // Declared Pauli but the file contains fermionic integrals.
    let dir = std::env::temp_dir().join("hvmc-config-validation");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fermion.txt");
    std::fs::write(&path, "norbitals 4\n1b 0 0 -1.25\n2b 0 1 1 0 0.5\n").unwrap();
    let text = BASE.replace(
        "kind = \"afh\"\nn = 3",
        &format!("kind = \"pauli-file\"\npath = {:?}", path.to_str().unwrap()),
    );
    rejects(&text, "kind");
}
