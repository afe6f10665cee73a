use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use super::{Command, ModelArgs, RunConfig, UsageError};
use crate::features::{extract, AudioClip, FeatureFile};
use crate::hmm::{random_model, sample, Topology, MAX_ORDER};
use crate::inference::{expected_mul_adds, forward_with, Kernel};
use crate::io_util::write_atomic;
use crate::speaker_id::{
    cross_validate, load_utterance, mean_sd, synth_population, t_test, EvalTable, Manifest, ManifestRow,
    Registry, ScoredTrials, Split, StressTransform, NEUTRAL, SHOUTED, T_CRITICAL_05,
};
use crate::supra::family_label;

pub(super) fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Extract { audio_dir, out } => extract_dir(&audio_dir, &out),
        Command::Train { manifest, out, model } => train(&manifest, &out, &model),
        Command::Identify { registry, clip, alpha } => identify(&registry, &clip, alpha),
        Command::Evaluate {
            registry,
            manifest,
            alpha_sweep,
            alpha,
            out,
        } => evaluate(&registry, &manifest, alpha_sweep, alpha, &out),
        Command::Crossval {
            manifest,
            folds,
            enroll_condition,
            out,
            model,
        } => crossval(&manifest, folds, &enroll_condition, out.as_deref(), &model),
        Command::Ttest { a, b } => ttest(&a, &b),
        Command::Bench {
            states,
            orders,
            frames,
            topology,
            out,
        } => bench(&states, &orders, frames, &topology, out.as_deref()),
        Command::Synth {
            out,
            speakers,
            frames,
            no_stress,
            model,
        } => synth(&out, speakers, frames, no_stress, &model),
    }
}

fn base_dir(manifest: &Path) -> &Path {
    manifest.parent().unwrap_or(Path::new("."))
}

fn wav_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()
        .with_context(|| format!("reading {}", dir.display()))?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            wav_files(&path, out)?;
        } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")) {
            out.push(path);
        }
    }
    Ok(())
}

/// Labels from a clip path relative to the audio directory: the speaker is
/// the first directory component, or the first `_`-separated token of the
/// file name when the clip sits at the top level. Condition, split and
/// gender are picked up from any path token.
pub(crate) fn labels_from_path(relative: &Path) -> ManifestRow {
    let components: Vec<String> = relative
        .with_extension("")
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    let tokens: Vec<String> = components
        .iter()
        .flat_map(|c| c.split(['_', '-', '.']).map(str::to_ascii_lowercase))
        .collect();
    let speaker = if components.len() > 1 {
        components[0].clone()
    } else {
        components[0].split('_').next().unwrap_or_default().to_string()
    };
    let has = |t: &str| tokens.iter().any(|x| x == t);
    ManifestRow {
        path: String::new(),
        speaker,
        condition: if has(SHOUTED) { SHOUTED } else { NEUTRAL }.into(),
        split: if has("train") { Split::Train } else { Split::Test },
        gender: if has("female") {
            "female".into()
        } else if has("male") {
            "male".into()
        } else {
            String::new()
        },
    }
}

fn feature_name(relative: &Path) -> String {
    let stem = relative.with_extension("");
    let flat: Vec<String> = stem
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    format!("{}.json", flat.join("__"))
}

fn extract_dir(audio_dir: &Path, out: &Path) -> Result<()> {
    if !audio_dir.is_dir() {
        bail!(UsageError(format!("{} is not a directory", audio_dir.display())));
    }
    let mut clips = Vec::new();
    wav_files(audio_dir, &mut clips)?;
    if clips.is_empty() {
        return Err(crate::Error::Audio(format!("no .wav files under {}", audio_dir.display())).into());
    }
    let results: Vec<(PathBuf, crate::Result<FeatureFile>)> = clips
        .par_iter()
        .map(|path| {
            let relative = path.strip_prefix(audio_dir).unwrap_or(path).to_path_buf();
            let file = AudioClip::read_wav(path)
                .and_then(|clip| extract(&clip))
                .map(|u| FeatureFile::extracted(relative.to_string_lossy(), u));
            (relative, file)
        })
        .collect();

    let mut manifest = Manifest::default();
    let mut failures = Vec::new();
    for (relative, file) in results {
        match file {
            Ok(file) => {
                let name = format!("features/{}", feature_name(&relative));
                file.save(&out.join(&name))?;
                let mut row = labels_from_path(&relative);
                row.path = name;
                manifest.rows.push(row);
            }
            Err(e) => {
                eprintln!("{}: {e}", relative.display());
                failures.push(e);
            }
        }
    }
    let mut comments = vec![format!("extracted from {}", audio_dir.display())];
    comments.extend(
        serde_json::to_string(&crate::features::ExtractionMetadata::default())
            .map(|s| format!("features: {s}")),
    );
    manifest.save(&out.join("manifest.csv"), &comments)?;
    println!("{} clips extracted, {} failed", manifest.rows.len(), failures.len());
    if let Some(first) = failures.into_iter().next() {
        return Err(anyhow::Error::new(first).context("some clips could not be read"));
    }
    Ok(())
}

fn train(manifest_path: &Path, out: &Path, model: &ModelArgs) -> Result<()> {
    let cfg = model.resolve()?;
    let config = cfg.pipeline()?;
    let manifest = Manifest::load(manifest_path)?;
    let items = manifest.load_utterances(base_dir(manifest_path), Some(Split::Train))?;
    if items.is_empty() {
        return Err(crate::Error::format("manifest", "no rows with split=train").into());
    }
    let start = Instant::now();
    let registry = Registry::enroll(&items, &config)?;
    registry.save(out)?;
    println!(
        "{} model: {} speakers from {} utterances in {:.1} s -> {}",
        config.family(),
        registry.len(),
        items.len(),
        start.elapsed().as_secs_f64(),
        out.display()
    );
    for s in registry.speakers() {
        println!(
            "{}\tacoustic ll {:.4} ({} iterations)\tsupra ll {:.4} ({} iterations)",
            s.speaker_id,
            s.training.acoustic_ll.last().copied().unwrap_or(f64::NAN),
            s.training.acoustic_ll.len(),
            s.training.supra_ll.last().copied().unwrap_or(f64::NAN),
            s.training.supra_ll.len()
        );
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<f64, UsageError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(UsageError(format!("--alpha must be in [0, 1] (got {alpha})")))
    }
}

fn identify(registry_path: &Path, clip: &Path, alpha: Option<f64>) -> Result<()> {
    let registry = Registry::load(registry_path)?;
    let alpha = check_alpha(alpha.unwrap_or(registry.config().supra.alpha))?;
    let utterance = load_utterance(clip)?;
    let ranked = registry.identify(&utterance, alpha)?;
    let mut out = String::new();
    for (rank, (id, score)) in ranked.iter().enumerate() {
        writeln!(out, "{}\t{id}\t{score:.6}", rank + 1)?;
    }
    print!("{out}");
    Ok(())
}

fn evaluate(
    registry_path: &Path,
    manifest_path: &Path,
    sweep: Option<Vec<f64>>,
    alpha: Option<f64>,
    out: &Path,
) -> Result<()> {
    let registry = Registry::load(registry_path)?;
    let alphas = match (sweep, alpha) {
        (Some(s), _) => s,
        (None, Some(a)) => vec![a],
        (None, None) => vec![registry.config().supra.alpha],
    };
    if alphas.is_empty() {
        bail!(UsageError("--alpha-sweep is empty".into()));
    }
    for &a in &alphas {
        check_alpha(a)?;
    }
    let manifest = Manifest::load(manifest_path)?;
    let items = manifest.load_utterances(base_dir(manifest_path), Some(Split::Test))?;
    for item in &items {
        if registry.position(&item.speaker).is_none() {
            return Err(crate::Error::UnknownSpeaker(item.speaker.clone()).into());
        }
    }
    let trials = ScoredTrials::score(&registry, &items)?;
    let comments = vec![
        format!("registry {}", registry_path.display()),
        format!("manifest {}", manifest_path.display()),
        format!("config {}", serde_json::to_string(registry.config())?),
    ];
    let mut summary = EvalTable::default();
    for &a in &alphas {
        let result = trials.evaluate(a)?;
        let table = result.table();
        table.save(&out.join(format!("eval_alpha_{a:.2}.csv")), &comments)?;
        for row in table.rows.iter().filter(|r| r.gender == crate::speaker_id::ALL_GENDERS) {
            println!(
                "{}\talpha={:.2}\t{}\t{}/{}\t{:.1}%",
                row.model, row.alpha, row.condition, row.correct, row.trials, row.accuracy
            );
            summary.rows.push(row.clone());
        }
    }
    summary.save(&out.join("summary.csv"), &comments)?;
    Ok(())
}

fn crossval(
    manifest_path: &Path,
    folds: Option<usize>,
    enroll_condition: &str,
    out: Option<&Path>,
    model: &ModelArgs,
) -> Result<()> {
    let cfg = model.resolve()?;
    let config = cfg.pipeline()?;
    let k = folds.unwrap_or(cfg.folds);
    if k < 2 {
        bail!(UsageError(format!("--folds must be at least 2 (got {k})")));
    }
    let manifest = Manifest::load(manifest_path)?;
    let items = manifest.load_utterances(base_dir(manifest_path), None)?;
    let cv = cross_validate(&items, k, &config, cfg.alpha, enroll_condition, cfg.seed)?;
    for fold in &cv.folds {
        match &fold.invalid {
            Some(reason) => println!("fold {}\tinvalid: {reason}", fold.fold),
            None => {
                let cells: Vec<String> = fold.accuracy.iter().map(|(c, a)| format!("{c} {a:.1}%")).collect();
                println!("fold {}\ttrain {}\ttest {}\t{}", fold.fold, fold.train, fold.test, cells.join("\t"));
            }
        }
    }
    for s in &cv.summary {
        println!("{}\t{} folds\tmean {:.2}%\tsd {:.2}", s.condition, s.folds, s.mean, s.sd);
    }
    if let Some(path) = out {
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a RunConfig,
            manifest: String,
            result: &'a crate::speaker_id::CrossValidation,
        }
        let report = Report {
            config: &cfg,
            manifest: manifest_path.display().to_string(),
            result: &cv,
        };
        write_atomic(path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    Ok(())
}

fn ttest(a: &[f64], b: &[f64]) -> Result<()> {
    let t = t_test(a, b).map_err(|e| UsageError(e.to_string()))?;
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    println!("a\tmean {ma:.4}\tsd {sa:.4}");
    println!("b\tmean {mb:.4}\tsd {sb:.4}");
    let verdict = if t.abs() > T_CRITICAL_05 {
        "significant"
    } else {
        "not significant"
    };
    println!("t = {t:.4}\t{verdict} at the 0.05 level (|t| > {T_CRITICAL_05})");
    Ok(())
}

fn bench(states: &[usize], orders: &[usize], frames: usize, topology: &Topology, out: Option<&Path>) -> Result<()> {
    if topology.is_expanded() {
        bail!(UsageError("--topology must be ltr or circular".into()));
    }
    for &k in orders {
        if !(1..=MAX_ORDER).contains(&k) {
            bail!(UsageError(format!("orders must be 1, 2 or 3 (got {k})")));
        }
    }
    if states.iter().any(|&n| n < 2) {
        bail!(UsageError("state counts must be at least 2".into()));
    }
    let mut csv = String::from("states,order,topology,kernel,frames,per_step,mul_adds,expected,seconds\n");
    println!("N\torder\tkernel\tper_step\tmul_adds\texpected\tms");
    let mut dense_by_order: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &n in states {
        for &k in orders {
            if frames < k {
                bail!(UsageError(format!("--frames must be at least the order ({k})")));
            }
            let model = random_model(k, topology.clone(), n, 1, 4, 1.0, 7)?;
            let (_, obs) = sample(&model, frames, 11)?;
            for kernel in [Kernel::Dense, Kernel::Masked] {
                let start = Instant::now();
                let result = forward_with(&model, &obs, kernel)?;
                let seconds = start.elapsed().as_secs_f64();
                let expected = expected_mul_adds(topology, n, k, frames, kernel);
                let measured = result.stats.mul_add_count;
                if measured != expected {
                    bail!("count mismatch for N={n} order={k} {kernel:?}: {measured} != {expected}");
                }
                if kernel == Kernel::Dense {
                    dense_by_order.insert((n, k), result.stats.mul_adds_per_step);
                }
                let name = format!("{kernel:?}").to_ascii_lowercase();
                let per_step = result.stats.mul_adds_per_step;
                println!("{n}\t{k}\t{name}\t{per_step}\t{measured}\t{expected}\t{:.3}", seconds * 1e3);
                writeln!(csv, "{n},{k},{topology},{name},{frames},{per_step},{measured},{expected},{seconds:.6}")?;
            }
        }
    }
    for (&(n, k), &count) in &dense_by_order {
        if let Some(&prev) = dense_by_order.get(&(n, k.wrapping_sub(1))) {
            println!("N={n}: dense per-step count, order {k} / order {} = {}", k - 1, count as f64 / prev as f64);
        }
    }
    if let Some(path) = out {
        write_atomic(path, csv.as_bytes())?;
    }
    Ok(())
}

fn synth(out: &Path, speakers: Option<usize>, frames: Option<usize>, no_stress: bool, model: &ModelArgs) -> Result<()> {
    let cfg = model.resolve()?;
    let mut sc = cfg.synth.clone();
    if model.order.is_some() {
        sc.order = cfg.order;
    }
    if model.topology.is_some() {
        sc.topology = cfg.topology.clone();
    }
    if model.states.is_some() {
        sc.n_states = cfg.states;
    }
    if model.seed.is_some() {
        sc.seed = cfg.seed;
    }
    if let Some(n) = speakers {
        sc.n_speakers = n;
    }
    if let Some(t) = frames {
        sc.frames_per_clip = t;
    }
    if no_stress {
        sc.stress = StressTransform::identity();
    }
    sc.validate().map_err(|e| UsageError(e.to_string()))?;
    let population = synth_population(&sc)?;

    let mut counters: BTreeMap<(String, String, Split), usize> = BTreeMap::new();
    let mut manifest = Manifest::default();
    for item in &population.items {
        let n = counters
            .entry((item.speaker.clone(), item.condition.clone(), item.split))
            .or_default();
        let split = match item.split {
            Split::Train => "train",
            Split::Test => "test",
        };
        let name = format!("features/{}_{}_{split}_{:02}.json", item.speaker, item.condition, *n);
        *n += 1;
        FeatureFile::generated(name.clone(), item.utterance.clone()).save(&out.join(&name))?;
        manifest.rows.push(ManifestRow {
            path: name,
            speaker: item.speaker.clone(),
            condition: item.condition.clone(),
            split: item.split,
            gender: item.gender.clone().unwrap_or_default(),
        });
    }
    for truth in &population.speakers {
        let path = out.join(format!("truth/{}.json", truth.speaker_id));
        write_atomic(&path, serde_json::to_string_pretty(truth)?.as_bytes())?;
    }
    let saved = RunConfig {
        synth: sc.clone(),
        ..cfg
    };
    write_atomic(&out.join("config.toml"), saved.to_toml().as_bytes())?;
    manifest.save(&out.join("manifest.csv"), &saved.comment_lines())?;
    println!(
        "{} speakers, {} utterances ({} generative model) -> {}",
        population.speakers.len(),
        manifest.rows.len(),
        family_label(&sc.topology, sc.order),
        out.display()
    );
    Ok(())
}
