//! Implementations of the nine subcommands.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde_json::json;

use offmask_core::attention::{mean_loss, model_to_text, train, ToyEncoderParams, TrainConfig};
use offmask_core::corpus::{corpus_to_tsv, Label, LabeledCorpus, LabeledDocument, RawDocument};
use offmask_core::error::Error as CoreError;
use offmask_core::eval::{
    classification_report, compare_strategies, ingest_corpus_tsv, stratified_kfold, CompareConfig,
    LabelMap,
};
use offmask_core::masking::{strategy_by_name, sweep_thresholds, MaskStrategy};
use offmask_core::preprocess::{preprocess_document, EmojiMap, PreprocessPolicy};
use offmask_core::scoring::{
    build_score_table, fit_nb, parse_score_table, score_table_to_tsv, ScoreTable, TfIdfConfig,
};
use offmask_core::tokenizer::{
    basic_tokenize, encode, parse_tokenized_tsv, tokenized_to_tsv, wordpiece_tokenize,
    TokenSequence, Vocabulary,
};

use crate::manifest::RunContext;
use crate::{
    BuildMaskArgs, BuildScoresArgs, CliError, CompareArgs, EvalArgs, Lang, PreprocessArgs,
    ScoreTextArgs, SweepThresholdArgs, TokenizeArgs, TrainToyArgs,
};

fn load_label_map(ctx: &mut RunContext, path: &Option<PathBuf>) -> Result<LabelMap, CliError> {
    match path {
        Some(p) => Ok(LabelMap::parse(&ctx.read_input(p)?)?),
        None => Ok(LabelMap::standard()),
    }
}

fn load_vocab(ctx: &mut RunContext, path: &PathBuf) -> Result<Vocabulary, CliError> {
    Ok(Vocabulary::parse(&ctx.read_input(path)?)?)
}

fn load_scores(ctx: &mut RunContext, path: &PathBuf) -> Result<ScoreTable, CliError> {
    Ok(parse_score_table(&ctx.read_input(path)?)?)
}

fn ingest(
    ctx: &mut RunContext,
    path: &PathBuf,
    map: &LabelMap,
) -> Result<Vec<RawDocument>, CliError> {
    Ok(ingest_corpus_tsv(&ctx.read_input(path)?, map)?)
}

fn require_labels(docs: Vec<RawDocument>) -> Result<LabeledCorpus, CliError> {
    let mut labeled = Vec::with_capacity(docs.len());
    for doc in docs {
        match doc.label {
            Some(label) => labeled.push(LabeledDocument {
                id: doc.id,
                text: doc.text,
                label,
            }),
            None => {
                return Err(CliError::data(format!(
                    "document {:?} has no label",
                    doc.id
                )))
            }
        }
    }
    Ok(LabeledCorpus::new(labeled))
}

fn encode_corpus(
    corpus: &LabeledCorpus,
    vocab: &Vocabulary,
    max_len: usize,
    lowercase: bool,
) -> Result<Vec<(TokenSequence, Label)>, CliError> {
    let mut encoded = Vec::with_capacity(corpus.len());
    for doc in &corpus.docs {
        let seq = encode(&doc.text, vocab, max_len, lowercase).map_err(|e| match e {
            CoreError::EmptyInput => {
                CliError::data(format!("document {:?} encodes to no tokens", doc.id))
            }
            other => CliError::from(other),
        })?;
        encoded.push((seq, doc.label));
    }
    Ok(encoded)
}

pub fn preprocess(args: PreprocessArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "preprocess",
        json!({
            "mode": format!("{:?}", args.mode).to_lowercase(),
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "emoji_map": args.emoji_map.as_ref().map(|p| p.display().to_string()),
            "label_map": args.label_map.as_ref().map(|p| p.display().to_string()),
        }),
    );
    let label_map = load_label_map(&mut ctx, &args.label_map)?;
    let emoji_map = match &args.emoji_map {
        Some(p) => Some(EmojiMap::parse(&ctx.read_input(p)?)?),
        None => None,
    };
    let policy = match args.mode {
        Lang::En => PreprocessPolicy::english(emoji_map),
        Lang::Fa => PreprocessPolicy::persian(),
    };
    let docs = ingest(&mut ctx, &args.input, &label_map)?;
    let mut kept = Vec::with_capacity(docs.len());
    let mut dropped = 0usize;
    for doc in &docs {
        match preprocess_document(doc, &policy) {
            Ok(clean) => kept.push(clean),
            Err(CoreError::EmptyAfterPreprocess(id)) => {
                log::warn!("dropping document {id:?}: empty after preprocessing");
                dropped += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let tsv = corpus_to_tsv(&kept)?;
    ctx.write_output(&args.output, tsv.as_bytes())?;
    println!(
        "preprocessed {} documents ({dropped} dropped as empty) -> {}",
        kept.len(),
        args.output.display()
    );
    Ok(())
}

pub fn tokenize(args: TokenizeArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "tokenize",
        json!({
            "vocab": args.vocab.display().to_string(),
            "max_len": args.max_len,
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "mode": format!("{:?}", args.mode).to_lowercase(),
        }),
    );
    let vocab = load_vocab(&mut ctx, &args.vocab)?;
    let docs = ingest(&mut ctx, &args.input, &LabelMap::standard())?;
    let mut rows = Vec::with_capacity(docs.len());
    let mut dropped = 0usize;
    for doc in &docs {
        match encode(&doc.text, &vocab, args.max_len, args.mode.lowercase()) {
            Ok(seq) => rows.push((doc.id.clone(), seq)),
            Err(CoreError::EmptyInput) => {
                log::warn!("dropping document {:?}: no tokens", doc.id);
                dropped += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let tsv = tokenized_to_tsv(&rows);
    ctx.write_output(&args.output, tsv.as_bytes())?;
    println!(
        "tokenized {} documents ({dropped} dropped) -> {}",
        rows.len(),
        args.output.display()
    );
    Ok(())
}

pub fn build_scores(args: BuildScoresArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "build-scores",
        json!({
            "train": args.train.display().to_string(),
            "vocab": args.vocab.display().to_string(),
            "mode": args.mode.to_core().as_str(),
            "out": args.out.display().to_string(),
            "max_len": args.max_len,
            "lang": format!("{:?}", args.lang).to_lowercase(),
            "label_map": args.label_map.as_ref().map(|p| p.display().to_string()),
            "idf_smoothing": !args.no_idf_smoothing,
            "l2_normalize": !args.no_l2_normalize,
        }),
    );
    let vocab = load_vocab(&mut ctx, &args.vocab)?;
    let label_map = load_label_map(&mut ctx, &args.label_map)?;
    let corpus = require_labels(ingest(&mut ctx, &args.train, &label_map)?)?;
    let encoded = encode_corpus(&corpus, &vocab, args.max_len, args.lang.lowercase())?;
    let config = TfIdfConfig {
        idf_smoothing: !args.no_idf_smoothing,
        per_document_l2_normalize: !args.no_l2_normalize,
    };
    let model = fit_nb(&encoded, &vocab, args.mode.to_core(), &config)?;
    let table = build_score_table(&model);
    ctx.write_output(&args.out, score_table_to_tsv(&table).as_bytes())?;
    println!(
        "scored {} tokens from {} documents -> {}",
        table.len(),
        corpus.len(),
        args.out.display()
    );
    println!("tokens with score >= 0.6: {}", table.count_at_or_above(0.6));
    Ok(())
}

pub fn score_text(args: ScoreTextArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new("score-text", json!({}));
    let table = load_scores(&mut ctx, &args.scores)?;
    let text = if args.lang.lowercase() {
        args.text.to_lowercase()
    } else {
        args.text.clone()
    };
    let vocab = match &args.vocab {
        Some(p) => Some(load_vocab(&mut ctx, p)?),
        None => None,
    };
    let mut tokens: Vec<String> = Vec::new();
    for word in basic_tokenize(&text) {
        match &vocab {
            Some(v) => tokens.extend(wordpiece_tokenize(&word, v)),
            None => tokens.push(word),
        }
    }
    println!("token\tscore\tin_database");
    for token in tokens {
        match table.get(&token) {
            Some(score) => println!("{token}\t{score:.4}\tyes"),
            None => println!("{token}\t-\tno"),
        }
    }
    Ok(())
}

pub fn build_mask(args: BuildMaskArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "build-mask",
        json!({
            "strategy": args.strategy,
            "threshold": args.threshold,
            "fallback": format!("{:?}", args.fallback),
            "scores": args.scores.display().to_string(),
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
        }),
    );
    let table = load_scores(&mut ctx, &args.scores)?;
    let docs = parse_tokenized_tsv(&ctx.read_input(&args.input)?)?;
    let strategy = strategy_by_name(&args.strategy, args.threshold, args.fallback.to_core())?;
    let mut out = String::from("id\tmask\n");
    for (id, seq) in &docs {
        let mask = strategy.build(seq, &table);
        let values: Vec<String> = mask.values().iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("{id}\t{}\n", values.join(" ")));
    }
    ctx.write_output(&args.output, out.as_bytes())?;
    println!(
        "built {} {} masks -> {}",
        docs.len(),
        strategy.name(),
        args.output.display()
    );
    Ok(())
}

pub fn train_toy(args: TrainToyArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "train-toy",
        json!({
            "train": args.train.display().to_string(),
            "vocab": args.vocab.display().to_string(),
            "scores": args.scores.display().to_string(),
            "strategy": args.strategy,
            "threshold": args.threshold,
            "fallback": format!("{:?}", args.fallback),
            "epochs": args.epochs,
            "lr": args.lr,
            "batch_size": args.batch_size,
            "seed": args.seed,
            "optimizer": args.optimizer.as_str(),
            "dim": args.dim,
            "max_len": args.max_len,
            "lang": format!("{:?}", args.lang).to_lowercase(),
            "model_out": args.model_out.display().to_string(),
        }),
    );
    let vocab = load_vocab(&mut ctx, &args.vocab)?;
    let table = load_scores(&mut ctx, &args.scores)?;
    let label_map = load_label_map(&mut ctx, &args.label_map)?;
    let corpus = require_labels(ingest(&mut ctx, &args.train, &label_map)?)?;
    let encoded = encode_corpus(&corpus, &vocab, args.max_len, args.lang.lowercase())?;
    let strategy = strategy_by_name(&args.strategy, args.threshold, args.fallback.to_core())?;
    let masks: Vec<_> = encoded.iter().map(|(s, _)| strategy.build(s, &table)).collect();
    let init = ToyEncoderParams::init(vocab.len(), args.dim as usize, args.seed);
    let config = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.lr,
        batch_size: args.batch_size as usize,
        seed: args.seed,
        optimizer: args.optimizer.to_core(),
    };
    let loss_before = mean_loss(&init, &encoded, &masks)?;
    let trained = train(&init, &encoded, &masks, &config)?;
    let loss_after = mean_loss(&trained, &encoded, &masks)?;
    ctx.write_output(&args.model_out, model_to_text(&trained).as_bytes())?;
    println!(
        "trained on {} documents: loss {loss_before:.4} -> {loss_after:.4}, model -> {}",
        corpus.len(),
        args.model_out.display()
    );
    Ok(())
}

/// Reads either `id<TAB>label` rows or a full corpus TSV into an id -> label
/// map.
fn read_label_file(ctx: &mut RunContext, path: &PathBuf) -> Result<BTreeMap<String, Label>, CliError> {
    let content = ctx.read_input(path)?;
    let mut lines = content.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty file", path.display())))?;
    let mut labels = BTreeMap::new();
    let mut insert = |id: &str, raw: &str| -> Result<(), CliError> {
        let label: Label = raw
            .parse()
            .map_err(|e: CoreError| CliError::data(format!("{}: {e}", path.display())))?;
        if labels.insert(id.to_string(), label).is_some() {
            return Err(CliError::data(format!(
                "{}: duplicate id {id:?}",
                path.display()
            )));
        }
        Ok(())
    };
    match header {
        "id\tlabel" => {
            for (lineno, line) in lines.enumerate() {
                if line.is_empty() {
                    continue;
                }
                let (id, raw) = line.split_once('\t').ok_or_else(|| {
                    CliError::data(format!("{}: line {}: missing tab", path.display(), lineno + 2))
                })?;
                insert(id, raw)?;
            }
        }
        "id\ttext\tlabel" => {
            let docs = ingest_corpus_tsv(&content, &LabelMap::standard())?;
            for doc in docs {
                let label = doc.label.ok_or_else(|| {
                    CliError::data(format!(
                        "{}: document {:?} has no label",
                        path.display(),
                        doc.id
                    ))
                })?;
                if labels.insert(doc.id.clone(), label).is_some() {
                    return Err(CliError::data(format!(
                        "{}: duplicate id {:?}",
                        path.display(),
                        doc.id
                    )));
                }
            }
        }
        other => {
            return Err(CliError::data(format!(
                "{}: expected header 'id\\tlabel' or 'id\\ttext\\tlabel', got {other:?}",
                path.display()
            )))
        }
    }
    Ok(labels)
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "eval",
        json!({
            "pred": args.pred.display().to_string(),
            "gold": args.gold.display().to_string(),
            "json_out": args.json_out.as_ref().map(|p| p.display().to_string()),
        }),
    );
    let pred_map = read_label_file(&mut ctx, &args.pred)?;
    let gold_map = read_label_file(&mut ctx, &args.gold)?;
    if pred_map.len() != gold_map.len() {
        return Err(CliError::data(format!(
            "{} predictions vs {} gold labels",
            pred_map.len(),
            gold_map.len()
        )));
    }
    let mut preds = Vec::with_capacity(gold_map.len());
    let mut golds = Vec::with_capacity(gold_map.len());
    for (id, gold) in &gold_map {
        let pred = pred_map
            .get(id)
            .ok_or_else(|| CliError::data(format!("no prediction for id {id:?}")))?;
        preds.push(*pred);
        golds.push(*gold);
    }
    let report = classification_report(&preds, &golds)?;
    println!("{report}");
    let json = json!({
        "not": {"precision": report.not.precision, "recall": report.not.recall, "f1": report.not.f1},
        "off": {"precision": report.off.precision, "recall": report.off.recall, "f1": report.off.f1},
        "macro_f1": report.macro_f1,
        "confusion": {
            "tn": report.confusion.tnc,
            "fp": report.confusion.fpc,
            "fn": report.confusion.fnc,
            "tp": report.confusion.tpc,
        },
        "documents": report.confusion.total(),
    });
    println!("{json}");
    if let Some(path) = &args.json_out {
        let pretty = format!("{}\n", serde_json::to_string_pretty(&json).expect("json"));
        ctx.write_output(path, pretty.as_bytes())?;
    }
    Ok(())
}

pub fn compare(args: CompareArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "compare",
        json!({
            "train": args.train.display().to_string(),
            "vocab": args.vocab.display().to_string(),
            "folds": args.folds,
            "fold_seed": args.fold_seed,
            "seeds": args.seeds,
            "strategies": args.strategies,
            "threshold": args.threshold,
            "fallback": format!("{:?}", args.fallback),
            "out": args.out.display().to_string(),
            "mode": args.mode.to_core().as_str(),
            "epochs": args.epochs,
            "lr": args.lr,
            "batch_size": args.batch_size,
            "optimizer": args.optimizer.as_str(),
            "dim": args.dim,
            "max_len": args.max_len,
            "lang": format!("{:?}", args.lang).to_lowercase(),
        }),
    );
    let vocab = load_vocab(&mut ctx, &args.vocab)?;
    let label_map = load_label_map(&mut ctx, &args.label_map)?;
    let corpus = require_labels(ingest(&mut ctx, &args.train, &label_map)?)?;
    let strategies: Vec<Box<dyn MaskStrategy>> = args
        .strategies
        .iter()
        .map(|name| strategy_by_name(name, args.threshold, args.fallback.to_core()))
        .collect::<Result<_, _>>()?;
    let config = CompareConfig {
        folds: args.folds as usize,
        fold_seed: args.fold_seed,
        seeds: args.seeds.clone(),
        max_tokens: args.max_len,
        lowercase: args.lang.lowercase(),
        count_mode: args.mode.to_core(),
        tfidf: TfIdfConfig::default(),
        model_dim: args.dim as usize,
        train: TrainConfig {
            epochs: args.epochs,
            learning_rate: args.lr,
            batch_size: args.batch_size as usize,
            seed: 0,
            optimizer: args.optimizer.to_core(),
        },
    };
    let table = compare_strategies(&corpus, &vocab, &strategies, &config)?;
    ctx.write_output(&args.out, table.to_tsv().as_bytes())?;
    println!(
        "compared {} strategies over {} folds x {} seeds -> {}",
        strategies.len(),
        args.folds,
        args.seeds.len(),
        args.out.display()
    );
    for strategy in &args.strategies {
        if let Some(mean) = table.mean_for(strategy) {
            println!("mean macro-F1 {strategy}: {mean:.4}");
        }
    }
    Ok(())
}

pub fn sweep_threshold(args: SweepThresholdArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new(
        "sweep-threshold",
        json!({
            "train": args.train.display().to_string(),
            "vocab": args.vocab.display().to_string(),
            "min": args.min,
            "max": args.max,
            "step": args.step,
            "folds": args.folds,
            "fold_seed": args.fold_seed,
            "seed": args.seed,
            "out": args.out.display().to_string(),
            "mode": args.mode.to_core().as_str(),
            "epochs": args.epochs,
            "lr": args.lr,
            "batch_size": args.batch_size,
            "optimizer": args.optimizer.as_str(),
            "dim": args.dim,
            "max_len": args.max_len,
            "lang": format!("{:?}", args.lang).to_lowercase(),
        }),
    );
    let vocab = load_vocab(&mut ctx, &args.vocab)?;
    let label_map = load_label_map(&mut ctx, &args.label_map)?;
    let corpus = require_labels(ingest(&mut ctx, &args.train, &label_map)?)?;
    let encoded = encode_corpus(&corpus, &vocab, args.max_len, args.lang.lowercase())?;
    let labels = corpus.labels();
    let folds = stratified_kfold(&labels, args.folds as usize, args.fold_seed)?;
    let fold = &folds[0];

    let train_docs: Vec<(TokenSequence, Label)> =
        fold.train.iter().map(|&i| encoded[i].clone()).collect();
    let model = fit_nb(&train_docs, &vocab, args.mode.to_core(), &TfIdfConfig::default())?;
    let table = build_score_table(&model);

    let seqs: Vec<TokenSequence> = encoded.iter().map(|(s, _)| s.clone()).collect();
    let train_config = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.lr,
        batch_size: args.batch_size as usize,
        seed: args.seed,
        optimizer: args.optimizer.to_core(),
    };
    let init = ToyEncoderParams::init(vocab.len(), args.dim as usize, args.seed);
    let sweep = sweep_thresholds(
        &seqs,
        &table,
        args.min,
        args.max,
        args.step,
        |_, masks| {
            let batch_docs: Vec<(TokenSequence, Label)> =
                fold.train.iter().map(|&i| encoded[i].clone()).collect();
            let batch_masks: Vec<_> = fold.train.iter().map(|&i| masks[i].clone()).collect();
            let trained = train(&init, &batch_docs, &batch_masks, &train_config)?;
            let mut preds = Vec::with_capacity(fold.validation.len());
            let mut golds = Vec::with_capacity(fold.validation.len());
            for &i in &fold.validation {
                preds.push(offmask_core::attention::predict_label(
                    &trained, &encoded[i].0, &masks[i],
                )?);
                golds.push(encoded[i].1);
            }
            Ok(classification_report(&preds, &golds)?.macro_f1)
        },
    )?;

    let mut out = String::from("threshold\tmacro_f1\n");
    for (t, f1) in &sweep.points {
        out.push_str(&format!("{t:.2}\t{f1:.6}\n"));
    }
    out.push_str(&format!("# argmax\t{:.2}\t{:.6}\n", sweep.best.0, sweep.best.1));
    ctx.write_output(&args.out, out.as_bytes())?;
    println!(
        "swept {} thresholds; best {:.2} at macro-F1 {:.4} -> {}",
        sweep.points.len(),
        sweep.best.0,
        sweep.best.1,
        args.out.display()
    );
    Ok(())
}
