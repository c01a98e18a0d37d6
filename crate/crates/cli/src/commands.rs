use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use vocalscreen::dataset::{symptom_prevalence, synth_corpus, Manifest, SynthConfig, TaskSpec};
use vocalscreen::eval::{
    mean_roc_curve, render_comparison, render_summary_table, roc_csv, run_task, EvalConfig, EvalSummary, TaskRun,
};
use vocalscreen::features::SymptomVocabulary;
use vocalscreen::learn::TrainConfig;
use vocalscreen::pipeline::{extract_manifest, ExtractionConfig};
use vocalscreen::store::FeatureStore;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::{EvaluateArgs, ExtractArgs, Preset, ReportArgs, SynthArgs};

const MEAN_ROC_GRID: usize = 101;

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn existing(path: &Path, what: &str) -> Result<(), CliError> {
    if !path.exists() {
        return Err(CliError::Runtime(format!("{what} {} does not exist", path.display())));
    }
    Ok(())
}

fn vocabulary(path: &Option<PathBuf>) -> Result<SymptomVocabulary, CliError> {
    Ok(match path {
        Some(p) => SymptomVocabulary::from_json_file(p)?,
        None => SymptomVocabulary::default(),
    })
}

pub fn synth(cfg: &mut RunConfig, args: SynthArgs) -> Result<(), CliError> {
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = RunConfig::require(&cfg.out, "--out")?.clone();
    let mut synth = match args.preset {
        Some(Preset::Default) => SynthConfig::default(),
        Some(Preset::Separable) => SynthConfig::separable(cfg.seed),
        Some(Preset::Null) => SynthConfig::null_signal(cfg.seed),
        None => cfg.synth.clone(),
    };
    synth.seed = cfg.seed;
    if let Some(n) = args.pos {
        synth.positive_participants = n;
    }
    if let Some(n) = args.neg {
        synth.negative_participants = n;
    }
    if let Some(n) = args.samples_per_participant {
        synth.samples_per_participant = n;
    }
    if let Some(n) = args.transitioned {
        synth.transitioned_participants = n;
    }
    synth.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    create_dir(&out)?;
    let corpus = synth_corpus(&synth, &out)?;
    let pos = corpus
        .records
        .iter()
        .filter(|r| r.test_status == vocalscreen::dataset::TestStatus::Positive)
        .count();
    println!("manifest: {}", corpus.manifest_path.display());
    println!(
        "samples: {} ({} positive, {} negative) from {} participants",
        corpus.records.len(),
        pos,
        corpus.records.len() - pos,
        synth.positive_participants + synth.negative_participants
    );
    Ok(())
}

pub fn extract(cfg: &mut RunConfig, args: ExtractArgs) -> Result<(), CliError> {
    if let Some(m) = args.manifest {
        cfg.manifest = Some(m);
    }
    if let Some(o) = args.out {
        cfg.out = Some(o);
    }
    let manifest_path = RunConfig::require(&cfg.manifest, "--manifest")?.clone();
    let out = RunConfig::require(&cfg.out, "--out")?.clone();
    existing(&manifest_path, "manifest")?;
    let ecfg = ExtractionConfig {
        preprocess: cfg.preprocess.clone(),
        frame: cfg.frame.clone(),
    };
    ecfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let manifest = Manifest::read(&manifest_path)?;
    let report = extract_manifest(&manifest, &ecfg)?;
    create_dir(&out)?;
    let features_path = out.join("features.csv");
    report.store.save(&features_path)?;
    let rejections_path = out.join("rejections.csv");
    let file = File::create(&rejections_path).map_err(|e| CliError::io(format!("cannot write {}", rejections_path.display()), e))?;
    report.write_rejections(BufWriter::new(file))?;

    println!("features: {} ({} rows)", features_path.display(), report.store.len());
    println!("rejections: {} ({} rows)", rejections_path.display(), report.rejections.len());
    if report.store.is_empty() {
        return Err(CliError::Runtime("every manifest row was rejected".into()));
    }
    Ok(())
}

fn write_run(out: &Path, run: &TaskRun) -> Result<(), CliError> {
    let stem = format!("{}_{}", run.summary.task, run.summary.method.id());
    write(&out.join(format!("summary_{stem}.json")), &run.summary.to_json()?)?;
    write(
        &out.join(format!("table_{stem}.txt")),
        &render_summary_table(std::slice::from_ref(&run.summary)),
    )?;
    for fold in &run.folds {
        write(&out.join(format!("roc_{stem}_fold{}.csv", fold.fold + 1)), &roc_csv(&fold.roc)?)?;
    }
    let curves: Vec<_> = run.folds.iter().map(|f| f.roc.clone()).collect();
    write(
        &out.join(format!("roc_{stem}_mean.csv")),
        &roc_csv(&mean_roc_curve(&curves, MEAN_ROC_GRID))?,
    )?;
    let models = out.join("models");
    create_dir(&models)?;
    for fold in &run.folds {
        for (modality, model) in &fold.models {
            model.save(models.join(format!("{stem}_fold{}_{modality}.json", fold.fold + 1)))?;
        }
    }
    Ok(())
}

pub fn evaluate(cfg: &mut RunConfig, args: EvaluateArgs) -> Result<(), CliError> {
    if let Some(v) = args.manifest {
        cfg.manifest = Some(v);
    }
    if let Some(v) = args.features {
        cfg.features = Some(v);
    }
    if let Some(v) = args.out {
        cfg.out = Some(v);
    }
    if let Some(v) = args.task {
        cfg.task = v.into();
    }
    if let Some(v) = args.method {
        cfg.method = v.into();
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.folds {
        cfg.folds = v;
    }
    if let Some(v) = args.recency_days {
        cfg.recency_days = v;
    }
    if let Some(v) = args.vocabulary {
        cfg.vocabulary = Some(v);
    }
    cfg.validate()?;
    let manifest_path = RunConfig::require(&cfg.manifest, "--manifest")?.clone();
    let features_path = RunConfig::require(&cfg.features, "--features")?.clone();
    let out = RunConfig::require(&cfg.out, "--out")?.clone();
    existing(&manifest_path, "manifest")?;
    existing(&features_path, "feature store")?;

    let manifest = Manifest::read(&manifest_path)?;
    let store = FeatureStore::load(&features_path)?;
    let vocab = vocabulary(&cfg.vocabulary)?;
    let spec = TaskSpec::with_recency(cfg.task, cfg.recency_days)?;
    let eval_cfg = EvalConfig {
        folds: cfg.folds,
        train: TrainConfig {
            svm: cfg.svm,
            smote_k: cfg.smote_k,
            platt_folds: cfg.platt_folds,
            seed: cfg.seed,
        },
        seed: cfg.seed,
    };
    let run = run_task(&manifest.records, &store, &vocab, spec, cfg.method, &eval_cfg)?;
    for fold in &run.folds {
        for (modality, model) in &fold.models {
            if !model.meta.converged {
                log::warn!("fold {} {modality} model did not converge", fold.fold + 1);
            }
        }
    }
    create_dir(&out)?;
    write_run(&out, &run)?;
    print!("{}", render_summary_table(std::slice::from_ref(&run.summary)));
    Ok(())
}

fn load_summaries(dir: &Path) -> Result<Vec<EvalSummary>, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(format!("cannot read {}", dir.display()), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("summary_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(format!("cannot read {}", p.display()), e))?;
            Ok(EvalSummary::from_json(&text)?)
        })
        .collect()
}

pub fn report(cfg: &mut RunConfig, args: ReportArgs) -> Result<(), CliError> {
    if let Some(v) = args.manifest {
        cfg.manifest = Some(v);
    }
    if let Some(v) = args.out {
        cfg.out = Some(v);
    }
    if let Some(v) = args.vocabulary {
        cfg.vocabulary = Some(v);
    }
    let out = RunConfig::require(&cfg.out, "--out")?.clone();
    existing(&out, "output directory")?;

    let mut produced = false;
    if let Some(manifest_path) = &cfg.manifest {
        existing(manifest_path, "manifest")?;
        let manifest = Manifest::read(manifest_path)?;
        let prevalence = symptom_prevalence(&manifest.records, &vocabulary(&cfg.vocabulary)?);
        write(&out.join("prevalence.csv"), &prevalence.to_csv())?;
        let bars = prevalence.render_bars();
        write(&out.join("prevalence.txt"), &bars)?;
        println!("{bars}");
        produced = true;
    }

    let summaries = load_summaries(&out)?;
    if !summaries.is_empty() {
        let mut by_task: BTreeMap<String, Vec<EvalSummary>> = BTreeMap::new();
        for s in summaries {
            by_task.entry(s.task.clone()).or_default().push(s);
        }
        let mut text = String::new();
        for (task, mut group) in by_task {
            group.sort_by_key(|s| s.method as u8);
            text.push_str(&format!("{task}\n"));
            text.push_str(&render_comparison(&group));
            text.push('\n');
        }
        write(&out.join("comparison.txt"), &text)?;
        print!("{text}");
        produced = true;
    }
    if !produced {
        return Err(CliError::Runtime(format!(
            "no summary_*.json files in {} and no --manifest given",
            out.display()
        )));
    }
    Ok(())
}
