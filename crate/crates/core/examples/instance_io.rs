//! Write an instance to disk and read it back bit for bit.

use l0peel::instance::{generate_instance, load_instance, save_instance, ExperimentConfig};

fn main() -> l0peel::Result<()> {
    let (inst, truth) = generate_instance(&ExperimentConfig {
        m: 6,
        n: 8,
        k: 2,
        ..ExperimentConfig::default()
    })?;
    let path = std::env::temp_dir().join("l0peel-instance.txt");
    save_instance(&path, &inst, Some(&truth))?;
    let (back, back_truth) = load_instance(&path)?;
    assert_eq!(back, inst);
    assert_eq!(back_truth.as_ref(), Some(&truth));
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines().take(3) {
        println!("{line}");
    }
    println!("... {} lines in {}", text.lines().count(), path.display());
    Ok(())
}
