//! Built-in run configurations for the benchmark studies.
//!
//! Each preset is a complete TOML run file; `run --preset <name>` behaves
//! exactly like `run --config` on the embedded text. Command-line overrides
//! (`--seed`, `--out`, `--hamiltonian`) apply on top, and a study that
//! varies one knob (system size, circuit depth, batch size) starts from the
//! preset text and edits that key.

/// Names in the order `presets` lists them.
pub const PRESET_NAMES: [&str; 6] = [
    "fig2-grid",
    "fig3-scaling",
    "fig4-sequential",
    "fig5-lih",
    "fig6-afh7",
    "nqs-baseline",
];

/// The embedded TOML for `name`, or `None` if the preset does not exist.
pub fn preset_toml(name: &str) -> Option<&'static str> {
    match name {
        "fig2-grid" => Some(FIG2_GRID),
        "fig3-scaling" => Some(FIG3_SCALING),
        "fig4-sequential" => Some(FIG4_SEQUENTIAL),
        "fig5-lih" => Some(FIG5_LIH),
        "fig6-afh7" => Some(FIG6_AFH7),
        "nqs-baseline" => Some(NQS_BASELINE),
        _ => None,
    }
}

/// 4-spin antiferromagnetic Heisenberg ring, stochastic reconfiguration.
/// Meant for the sampling-cost grid: sweep `sampling.batch` and
/// `sampling.shots` together over 10², 10³, 10⁴ (set `shots = "exact"` for
/// the infinite-measurement limit).
const FIG2_GRID: &str = r#"
[hamiltonian]
kind = "afh"
n = 4
periodic = true

[model.transformer]
embed_dim = 8
n_heads = 4
n_blocks = 2

[model.phase_net]
hidden = [16]

[model.circuit]
n_layers = 2
entanglement = "full"

[sampling]
batch = 10000
shots = 10000

[optimizer]
method = "sr"
eta_init = 5e-2
eta_min = 5e-3
sr_epsilon = 1e-3

[[schedule]]
blocks = ["transformer", "phase_net", "amp_circuit", "phase_circuit"]
iters = 250

[run]
iters = 250
seed = 1
"#;

/// Size-scaling study on periodic Heisenberg chains: rerun with
/// `hamiltonian.n` swept over 2..8 while everything else stays fixed.
/// Modest budgets (B = M = 10³) on purpose; the run stops early once the
/// relative error holds below 2e-4.
const FIG3_SCALING: &str = r#"
[hamiltonian]
kind = "afh"
n = 4
periodic = true

[model.transformer]
embed_dim = 8
n_heads = 4
n_blocks = 2

[model.phase_net]
hidden = [16]

[model.circuit]
n_layers = 2
entanglement = "linear"

[sampling]
batch = 1000
shots = 1000

[optimizer]
method = "sr"
eta_init = 5e-2
eta_min = 5e-3
sr_epsilon = 1e-3

[[schedule]]
blocks = ["transformer", "phase_net", "amp_circuit", "phase_circuit"]
iters = 400

[run]
iters = 400
seed = 1
stop_below_rel_error = 2e-4
stop_patience = 3
"#;

/// Two-stage training on a fixed 7-spin Heisenberg ring: the networks are
/// pre-trained alone for a fixed budget, then frozen while the circuits
/// refine the result. The pre-training stage is deliberately short of
/// convergence so the second stage has room to show what each circuit
/// depth adds. Measurements are exact, isolating circuit expressivity from
/// shot noise; rerun with different `model.circuit.n_layers` to compare
/// depths.
const FIG4_SEQUENTIAL: &str = r#"
[hamiltonian]
kind = "afh"
n = 7
periodic = true

[model.transformer]
embed_dim = 4
n_heads = 2
n_blocks = 1

[model.phase_net]
hidden = [16]

[model.circuit]
n_layers = 4
entanglement = "full"
share_theta = true

[sampling]
batch = 10000
shots = "exact"

[optimizer]
method = "adam"
eta_init = 5e-3
eta_min = 5e-4
adam_beta1 = 0.9
adam_beta2 = 0.95

[[schedule]]
blocks = ["transformer", "phase_net"]
iters = 400

[[schedule]]
blocks = ["amp_circuit", "phase_circuit"]
iters = 600

[run]
iters = 1000
seed = 1
"#;

/// Molecular ground state on 6 qubits. Requires a user-supplied operator
/// file (pass `--hamiltonian`): the intended input is an active-space
/// molecular Hamiltonian — e.g. lithium hydride in a minimal basis with the
/// core orbital frozen and the highest virtuals discarded, leaving three
/// spatial orbitals — expressed as Pauli strings after a fermion-to-qubit
/// mapping. The particle-number mask restricts sampling to the
/// one-up/one-down sector, and the shared-angle circuit has 60 parameters.
const FIG5_LIH: &str = r#"
[hamiltonian]
kind = "pauli-file"

[model.transformer]
embed_dim = 3
n_heads = 1
n_blocks = 1

[model.phase_net]
hidden = [16, 8]

[model.circuit]
n_layers = 4
entanglement = "full"
share_theta = true

[model.mask]
n_up = 1
n_down = 1

[sampling]
batch = 10000
shots = 10000

[optimizer]
method = "adam"
eta_init = 5e-3
eta_min = 5e-4
adam_beta1 = 0.9
adam_beta2 = 0.95

[[schedule]]
blocks = ["transformer", "phase_net", "amp_circuit", "phase_circuit"]
iters = 3000

[run]
iters = 3000
seed = 1
stop_below_abs_error = 1e-3
stop_patience = 5
"#;

/// 7-spin periodic Heisenberg ring with the hybrid ansatz under Adam; the
/// shared-angle four-layer circuit has 70 parameters. Compare against
/// `nqs-baseline`, which is the same run without the circuits.
const FIG6_AFH7: &str = r#"
[hamiltonian]
kind = "afh"
n = 7
periodic = true

[model.transformer]
embed_dim = 4
n_heads = 2
n_blocks = 1

[model.phase_net]
hidden = [16, 8]

[model.circuit]
n_layers = 4
entanglement = "full"
share_theta = true

[sampling]
batch = 10000
shots = 10000

[optimizer]
method = "adam"
eta_init = 5e-3
eta_min = 5e-4
adam_beta1 = 0.9
adam_beta2 = 0.95

[[schedule]]
blocks = ["transformer", "phase_net", "amp_circuit", "phase_circuit"]
iters = 3000

[run]
iters = 3000
seed = 1
stop_below_rel_error = 1e-3
stop_patience = 20
"#;

/// Purely neural ansatz (no circuits) on the same 7-spin ring as
/// `fig6-afh7`, with the second Adam moment slowed to 0.99 — the classical
/// baseline the hybrid run is measured against.
const NQS_BASELINE: &str = r#"
[hamiltonian]
kind = "afh"
n = 7
periodic = true

[model.transformer]
embed_dim = 4
n_heads = 2
n_blocks = 1

[model.phase_net]
hidden = [16, 8]

[sampling]
batch = 10000
shots = 10000

[optimizer]
method = "adam"
eta_init = 5e-3
eta_min = 5e-4
adam_beta1 = 0.9
adam_beta2 = 0.99

[[schedule]]
blocks = ["transformer", "phase_net"]
iters = 3000

[run]
iters = 3000
seed = 1
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in PRESET_NAMES {
            let text = preset_toml(name).unwrap();
            crate::config::RunConfig::parse(text)
                .unwrap_or_else(|e| panic!("preset {name} does not parse: {e:#}"));
        }
    }

    #[test]
    fn unknown_preset_is_none() {
        assert!(preset_toml("fig7-unheard-of").is_none());
    }
}
