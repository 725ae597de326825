//! Regenerates the bundled toy dataset under `data/toy/`.
//!
//! ```bash
//! cargo run -p lexicomp-cli --example gen_toy [-- <output-dir>]
//! ```

use std::path::PathBuf;

use lexicomp_core::synth::{synth_language, SynthConfig};

fn main() -> anyhow::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data/toy"));
    std::fs::create_dir_all(&dir)?;

    let languages = [
        synth_language("regulara", 101, &SynthConfig::regular(220)),
        synth_language("suppletia", 102, &SynthConfig::suppletive(200)),
        synth_language("zipfia", 103, &SynthConfig::zipfian(240)),
        // Not referenced by config.toml: a gate-failure control used by the
        // acceptance suite.
        synth_language("randomia", 104, &SynthConfig::unlearnable(120)),
    ];
    for lang in &languages {
        lang.write(&dir)?;
        println!("wrote {}", lang.id);
    }

    let mut config = String::from(
        "# Toy three-language run; regenerate the data with:\n\
         #   cargo run -p lexicomp-cli --example gen_toy\n\
         seed = 42\n\
         output_dir = \"out\"\n",
    );
    for id in ["regulara", "suppletia", "zipfia"] {
        config.push_str(&format!(
            "\n[[language]]\n\
             id = \"{id}\"\n\
             unimorph_path = \"{id}.unimorph.tsv\"\n\
             pron_path = \"{id}.pron.tsv\"\n\
             freq_path = \"{id}.freq.tsv\"\n"
        ));
    }
    std::fs::write(dir.join("config.toml"), config)?;
    println!("wrote config.toml");
    Ok(())
}
