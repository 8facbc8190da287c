//! DCQS, MH and PT on an equal sample budget through the experiment harness.

use dcqs::harness::{resolve, run_experiment, ExperimentConfig};

const CONFIG: &str = r#"{
    "name": "equal_budget_example",
    "instance": {"generator": "three_body", "n": 12, "n_pairs": 14, "n_triples": 18, "seed": 4},
    "seed": 1,
    "temperatures": [0.1, 0.5],
    "budget": 4000,
    "methods": [
        {"kind": "dcqs", "params": {"n_iter": 4, "n_shots": 700, "w": 10.0, "pp_refined_bias": true},
         "post_process": {"n_pp": 50, "n_sweeps": 2, "t_pp": 0.02}},
        {"kind": "mh", "label": "MH1", "walkers": 1},
        {"kind": "mh", "label": "MH50", "walkers": 50},
        {"kind": "pt", "ladder": {"betas": [0.1, 0.5, 1.0, 3.0, 10.0]}}
    ]
}"#;

fn main() -> dcqs::error::Result<()> {
    let exp = resolve(&ExperimentConfig::parse(CONFIG, "example")?, None)?;
    let run = run_experiment(&exp)?;
    for m in &run.body.methods {
        let kl: Vec<String> =
            m.rows.iter().map(|r| format!("T={} KL={:.4}", r.temperature, r.kl.unwrap_or(f64::NAN))).collect();
        println!("{:>5} {:>5} samples  {}", m.label, m.total_samples, kl.join("  "));
    }
    Ok(())
}
