//! Command-line front end: argument parsing, subcommand dispatch, and the
//! line-oriented structured report format. All numeric output is exact
//! rational text; timing chatter goes to stderr so stdout is deterministic.

use crate::automorphism::{compose_transfer_with_budget, NielsenWord};
use crate::error::{Error, Result};
use crate::optimize::{
    decide_hyperbolic, spectrum, HyperbolicityVerdict, OptimizeOptions, SpectrumReport,
};
use crate::polytope::FrequencyVector;
use crate::words::{frequency_vector, Alphabet};
use crate::rational;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::io::Write;

/// Environment variable overriding the vertex budget.
pub const BUDGET_ENV: &str = "FREQSPEC_VERTEX_BUDGET";

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "freqspec",
    about = "Frequency vectors of cyclic words in free groups: realization, \
             Nielsen automorphisms, and exact distortion spectra",
    disable_help_subcommand = true
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct AutoArgs {
    /// Free group rank k >= 2
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Nielsen word: whitespace-separated tokens inv:i, swap:i:j, mul:i:j
    /// (a_i -> a_i a_j), applied left-to-right; empty for the identity
    #[arg(long, default_value = "")]
    auto: String,
}

impl AutoArgs {
    fn parse_auto(&self) -> Result<NielsenWord> {
        NielsenWord::parse(self.rank, &self.auto)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frequency vectors of a cyclic word at every level up to --level
    Analyze {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Word literal; uppercase letters are inverses
        #[arg(long)]
        word: String,
        #[arg(long)]
        level: usize,
    },
    /// Realize a frequency-vector file as a cyclic word
    Realize {
        /// Path of the vector file, or - for stdin
        path: String,
    },
    /// Apply the induced automorphism action to a frequency-vector file
    Act {
        #[command(flatten)]
        auto: AutoArgs,
        /// Output level of the image vector
        #[arg(long)]
        level: usize,
        /// Path of the vector file, or - for stdin
        path: String,
    },
    /// Distortion extremes, the hyperbolicity constant, and witnesses
    Spectrum {
        #[command(flatten)]
        auto: AutoArgs,
        /// Cap the optimization window level
        #[arg(long)]
        max_window: Option<usize>,
        /// Show witness commentary in the human-readable section
        #[arg(long)]
        witness: bool,
    },
    /// Semi-decide hyperbolicity by interleaving power checks with a
    /// periodic-class search
    Hyperbolic {
        #[command(flatten)]
        auto: AutoArgs,
        #[arg(long, default_value_t = 6)]
        power_budget: u32,
    },
    /// Brute-force reference utilities
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Export the occurrence-transfer table of a target word
    Tables {
        #[command(flatten)]
        auto: AutoArgs,
        /// Target word whose image occurrences the table expresses
        #[arg(long)]
        target: String,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Exact ratio extremes over all classes up to --max-len
    Ratios {
        #[command(flatten)]
        auto: AutoArgs,
        #[arg(long)]
        max_len: usize,
    },
}

/// Entry point used by the binary and by tests. Returns the process exit
/// code; human/structured output goes to `out`, diagnostics to `err`.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let parsed = match CliArgs::try_parse_from(args) {
        Ok(parsed) => parsed,
        Err(clap_error) => {
            // clap renders its own help/version output with exit code 0
            let message = clap_error.render().to_string();
            if clap_error.use_stderr() {
                let _ = write!(err, "{message}");
                return EXIT_PARSE;
            }
            let _ = write!(out, "{message}");
            return EXIT_OK;
        }
    };
    match dispatch(parsed.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(error) => {
            let _ = writeln!(err, "error: {error}");
            match error {
                Error::BudgetExceeded(_) => EXIT_BUDGET,
                Error::InvariantViolation(_) => EXIT_INVARIANT,
                _ => EXIT_PARSE,
            }
        }
    }
}

fn options_from_env() -> OptimizeOptions {
    let mut options = OptimizeOptions::default();
    if let Ok(text) = std::env::var(BUDGET_ENV) {
        if let Ok(budget) = text.trim().parse::<u128>() {
            options.vertex_budget = budget;
        }
    }
    options
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Analyze { rank, word, level } => {
            if level < 1 {
                return Err(Error::Parse("--level must be at least 1".into()));
            }
            let alphabet = Alphabet::new(rank)?;
            let cyclic = alphabet.parse_cyclic(&word)?;
            emit(out, &format!("word = {cyclic}\nlength = {}\n", cyclic.len()))?;
            for m in 1..=level {
                let vector = frequency_vector(&alphabet, &cyclic, m);
                emit(out, "\n")?;
                emit(out, &vector.to_text())?;
            }
            Ok(())
        }
        Command::Realize { path } => {
            let vector = FrequencyVector::parse_text(&read_input(&path)?)?;
            let witness = vector.realize()?;
            emit(
                out,
                &format!(
                    "word = {}\nlength = {}\nscale = {}\n",
                    witness.word,
                    witness.word.len(),
                    witness.scale
                ),
            )
        }
        Command::Act { auto, level, path } => {
            if level < 1 {
                return Err(Error::Parse("--level must be at least 1".into()));
            }
            let auto = auto.parse_auto()?;
            let vector = FrequencyVector::parse_text(&read_input(&path)?)?;
            let image = crate::automorphism::act_on_frequencies(&auto, &vector, level)?;
            emit(out, &image.to_text())
        }
        Command::Spectrum { auto, max_window, witness } => {
            let auto_text = auto.auto.clone();
            let auto = auto.parse_auto()?;
            let mut options = options_from_env();
            if let Some(cap) = max_window {
                if cap < 2 {
                    return Err(Error::Parse("--max-window must be at least 2".into()));
                }
                let alphabet = auto.alphabet();
                options.vertex_budget = options.vertex_budget.min(alphabet.word_count(cap - 1));
            }
            let report = spectrum(&auto, &options)?;
            let _ = writeln!(
                err,
                "timings: extremes {} ms, hyperbolicity constant {} ms",
                report.extremes_ms, report.lambda_ms
            );
            print_spectrum(out, &report, &auto_text, witness)
        }
        Command::Hyperbolic { auto, power_budget } => {
            if power_budget < 1 {
                return Err(Error::Parse("--power-budget must be at least 1".into()));
            }
            let auto_text = auto.auto.clone();
            let auto = auto.parse_auto()?;
            let options = options_from_env();
            let verdict = decide_hyperbolic(&auto, power_budget, &options)?;
            emit(out, "[hyperbolic]\n")?;
            emit(out, &format!("rank = {}\n", auto.rank()))?;
            emit(out, &format!("auto = {}\n", auto_text.trim()))?;
            match verdict {
                HyperbolicityVerdict::Hyperbolic(power) => {
                    emit(out, "verdict = hyperbolic\n")?;
                    emit(out, &format!("power = {power}\n"))
                }
                HyperbolicityVerdict::PeriodicClass(class, power) => {
                    emit(out, "verdict = periodic_class\n")?;
                    emit(out, &format!("power = {power}\n"))?;
                    emit(out, &format!("class = {class}\n"))
                }
                HyperbolicityVerdict::BudgetExhausted => {
                    emit(out, "verdict = budget_exhausted\n")?;
                    emit(out, &format!("power_budget = {power_budget}\n"))
                }
            }
        }
        Command::Oracle { command } => match command {
            OracleCommand::Ratios { auto, max_len } => {
                if max_len < 1 {
                    return Err(Error::Parse("--max-len must be at least 1".into()));
                }
                let auto_text = auto.auto.clone();
                let auto = auto.parse_auto()?;
                let extremes = crate::oracle::brute_ratio_extremes(&auto, max_len)?;
                emit(out, "[oracle-ratios]\n")?;
                emit(out, &format!("rank = {}\n", auto.rank()))?;
                emit(out, &format!("auto = {}\n", auto_text.trim()))?;
                emit(out, &format!("max_len = {max_len}\n"))?;
                emit(
                    out,
                    &format!("min_ratio = {}\n", rational::format(&extremes.min_ratio)),
                )?;
                emit(
                    out,
                    &format!("max_ratio = {}\n", rational::format(&extremes.max_ratio)),
                )?;
                emit(out, &format!("min_witness = {}\n", extremes.argmins[0]))?;
                emit(out, &format!("max_witness = {}\n", extremes.argmaxes[0]))
            }
        },
        Command::Tables { auto, target } => {
            let auto_text = auto.auto.clone();
            let rank = auto.rank;
            let auto = auto.parse_auto()?;
            let alphabet = auto.alphabet();
            let target = alphabet.parse_word(&target)?;
            if target.is_empty() {
                return Err(Error::Parse("--target must be a nonempty word".into()));
            }
            let options = options_from_env();
            let table = compose_transfer_with_budget(&auto, &target, options.transfer)?;
            emit(
                out,
                &format!(
                    "window {} rank {rank} target {target} auto {}\n",
                    table.window_length(),
                    auto_text.trim()
                ),
            )?;
            for (pattern, mult) in table.patterns() {
                emit(out, &format!("{pattern} = {mult}\n"))?;
            }
            Ok(())
        }
    }
}

fn print_spectrum(
    out: &mut dyn Write,
    report: &SpectrumReport,
    auto_text: &str,
    witness: bool,
) -> Result<()> {
    let fmt = rational::format;
    emit(
        out,
        &format!(
            "distortion spectrum of `{}` on the rank-{} free group\n",
            auto_text.trim(),
            report.rank
        ),
    )?;
    emit(
        out,
        &format!(
            "  nu_plus  = {:<8} nu_minus = {:<8} lambda0 = {}\n",
            fmt(&report.nu_plus),
            fmt(&report.nu_minus),
            fmt(&report.lambda0)
        ),
    )?;
    emit(
        out,
        &format!(
            "  strictly hyperbolic: {}\n",
            if report.strictly_hyperbolic { "yes" } else { "no" }
        ),
    )?;
    if witness {
        emit(
            out,
            &format!(
                "  witnesses: sup at ({}), inf at ({})\n",
                report.nu_plus_witness, report.nu_minus_witness
            ),
        )?;
        match &report.lambda0_witness {
            Some((word, _)) if report.lambda0_attained => {
                emit(out, &format!("  hyperbolicity constant attained at ({word})\n"))?;
            }
            Some((word, gap)) => {
                emit(
                    out,
                    &format!(
                        "  hyperbolicity constant approached at ({word}), certified gap {}\n",
                        fmt(gap)
                    ),
                )?;
            }
            None => emit(out, "  hyperbolicity witness skipped (length cap)\n")?,
        }
    }
    emit(out, "\n[spectrum]\n")?;
    let mut lines: Vec<(String, String)> = vec![
        ("rank".into(), report.rank.to_string()),
        ("auto".into(), auto_text.trim().to_string()),
        ("level".into(), report.level.to_string()),
        ("window_length".into(), report.window_length.to_string()),
        ("nu_plus".into(), fmt(&report.nu_plus)),
        ("nu_plus_witness".into(), report.nu_plus_witness.to_string()),
        ("nu_minus".into(), fmt(&report.nu_minus)),
        ("nu_minus_witness".into(), report.nu_minus_witness.to_string()),
        ("lambda0".into(), fmt(&report.lambda0)),
        ("lambda0_attained".into(), report.lambda0_attained.to_string()),
        (
            "strictly_hyperbolic".into(),
            report.strictly_hyperbolic.to_string(),
        ),
    ];
    if let Some((word, gap)) = &report.lambda0_witness {
        lines.push(("lambda0_witness".into(), word.to_string()));
        lines.push(("lambda0_witness_gap".into(), fmt(gap)));
    }
    for (key, value) in lines {
        emit(out, &format!("{key} = {value}\n"))?;
    }
    Ok(())
}

/// Parses a structured `key = value` block (the text after a `[section]`
/// marker) back into a map; used to check report round-trips.
pub fn parse_structured(text: &str, section: &str) -> Result<BTreeMap<String, String>> {
    let marker = format!("[{section}]");
    let mut lines = text.lines().skip_while(|line| line.trim() != marker);
    if lines.next().is_none() {
        return Err(Error::Parse(format!("missing section {marker}")));
    }
    let mut map = BTreeMap::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('[') {
            break;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `key = value`, got {line:?}")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn read_input(path: &str) -> Result<String> {
    let content = if path == "-" {
        use std::io::Read;
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map(|_| buffer)
            .map_err(|io| Error::Parse(format!("reading stdin: {io}")))?
    } else {
        std::fs::read_to_string(path)
            .map_err(|io| Error::Parse(format!("reading {path}: {io}")))?
    };
    Ok(content)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|io| Error::Parse(format!("writing output: {io}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn run_capture(args: &[&str]) -> (u8, String, String) {
        let argv: Vec<String> = std::iter::once("freqspec".to_string())
            .chain(args.iter().map(|s| s.to_string()))
            .collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn analyze_prints_every_level() {
        let (code, out, _) = run_capture(&[
            "analyze", "--rank", "2", "--word", "abaab", "--level", "3",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("word = aabab"));
        assert!(out.contains("level 3 rank 2"));
        assert!(out.contains("aba = 2/5"));
        assert!(out.contains("bab = 1/5"));
        assert!(out.contains("aab = 1/5"));
        assert!(out.contains("baa = 1/5"));
    }

    #[test]
    fn spectrum_reports_exact_values() {
        let (code, out, _) = run_capture(&["spectrum", "--rank", "2", "--auto", "mul:1:2"]);
        assert_eq!(code, 0);
        let map = parse_structured(&out, "spectrum").unwrap();
        assert_eq!(map["nu_plus"], "2");
        assert_eq!(map["nu_minus"], "1/2");
        assert_eq!(map["strictly_hyperbolic"], "false");
        // re-parsing reproduces identical rational values
        assert_eq!(
            rational::parse(&map["nu_minus"]).unwrap(),
            Rational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn realize_consumes_vector_files() {
        let dir = std::env::temp_dir().join("freqspec-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("paper.fv");
        std::fs::write(
            &path,
            "level 3 rank 2\naba = 2/5\nbab = 1/5\naab = 1/5\nbaa = 1/5\n",
        )
        .unwrap();
        let (code, out, _) = run_capture(&["realize", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("length = 5"), "{out}");

        // a non-realizable vector exits with a parse-category error
        let bad = dir.join("bad.fv");
        std::fs::write(&bad, "level 1 rank 2\na = 1/2\nA = 1/2\n").unwrap();
        let (code, _, err) = run_capture(&["realize", bad.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("not realizable"));
    }

    #[test]
    fn act_applies_the_induced_map() {
        let dir = std::env::temp_dir().join("freqspec-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("act-input.fv");
        // level-8 vector of (abaab)
        let alphabet = Alphabet::new(2).unwrap();
        let w = alphabet.parse_cyclic("abaab").unwrap();
        std::fs::write(&path, frequency_vector(&alphabet, &w, 8).to_text()).unwrap();
        let (code, out, _) = run_capture(&[
            "act", "--rank", "2", "--auto", "mul:2:1", "--level", "1",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        // image class is (abaaaba): five a's, two b's
        assert!(out.contains("a = 5/7"), "{out}");
        assert!(out.contains("b = 2/7"), "{out}");
    }

    #[test]
    fn hyperbolic_and_oracle_subcommands() {
        let (code, out, _) = run_capture(&["hyperbolic", "--rank", "2", "--auto", ""]);
        assert_eq!(code, 0);
        assert!(out.contains("verdict = periodic_class"));
        assert!(out.contains("class = a"));

        let (code, out, _) = run_capture(&[
            "oracle", "ratios", "--rank", "2", "--auto", "mul:1:2", "--max-len", "5",
        ]);
        assert_eq!(code, 0);
        let map = parse_structured(&out, "oracle-ratios").unwrap();
        assert_eq!(map["max_ratio"], "2");
        assert_eq!(map["min_ratio"], "1/2");
    }

    #[test]
    fn tables_exports_integer_patterns() {
        let (code, out, _) = run_capture(&[
            "tables", "--rank", "2", "--auto", "mul:2:1", "--target", "a",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("window 8 rank 2 target a"));
        for line in out.lines().skip(1) {
            let (_, value) = line.split_once('=').unwrap();
            value.trim().parse::<u64>().unwrap();
        }
    }

    #[test]
    fn error_paths_use_distinct_exit_codes() {
        let (code, _, err) = run_capture(&["analyze", "--word", "a?b", "--level", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("parse error"));

        let (code, _, _) = run_capture(&["nonsense"]);
        assert_eq!(code, 2);

        // window cap forces the budget exit code
        let (code, _, err) = run_capture(&[
            "spectrum", "--rank", "2", "--auto", "mul:1:2 mul:2:1", "--max-window", "2",
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("budget"));
    }
}
