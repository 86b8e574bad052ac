//! Deterministic inputs for the pipeline benchmarks.

use cmdreason_core::dataset::{LabeledCommand, RequirementVector};
use cmdreason_core::metrics::PredictionRecord;

/// `n` commands whose labels cycle through all 256 vectors.
pub fn synthetic_dataset(n: usize) -> Vec<LabeledCommand> {
    (0..n)
        .map(|i| {
            let bits = (i * 37 + 11) as u8;
            let gold = RequirementVector::new(std::array::from_fn(|k| bits >> (7 - k) & 1 == 1));
            LabeledCommand::new(format!("s{i:05}"), format!("Synthetic command number {i}."), gold)
        })
        .collect()
}

/// Predictions that agree with gold except for one flipped flag on every third command.
pub fn noisy_predictions(data: &[LabeledCommand]) -> Vec<PredictionRecord> {
    data.iter()
        .enumerate()
        .map(|(i, c)| {
            let mut v = c.gold;
            if i % 3 == 0 {
                v.set(i % 8, !v.get(i % 8));
            }
            PredictionRecord::from_vector(&c.id, v)
        })
        .collect()
}

/// A stepwise answer of typical length ending in an answer line.
pub fn stepwise_response() -> String {
    let mut s = String::from("Explanation:\n");
    for k in 1..=8 {
        s.push_str(&format!(
            "Step {k}: {} - the command {} this subsystem for the requested action.\n",
            if k % 2 == 0 { "Yes" } else { "No" },
            if k % 2 == 0 { "involves" } else { "does not involve" },
        ));
    }
    s.push_str("Therefore, the output should be : [0 1 0 1 0 1 0 1]");
    s
}

/// The same answer with the bracket line removed, forcing the step fallback.
pub fn steps_only_response() -> String {
    let full = stepwise_response();
    full[..full.rfind("Therefore").unwrap()].to_string()
}
