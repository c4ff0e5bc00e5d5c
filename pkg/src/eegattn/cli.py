"""Command-line pipeline driver.

Subcommands: gen-corpus, reduce, stats, taskclf, scores, gen-task,
train, eval, report.  Every subcommand takes one --seed, reads optional
flat ``key = value`` config files (flags win), and writes a JSON run
manifest next to each primary output as ``<out>.manifest.json``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import asdict

import numpy as np

from . import attnscore, corpus, reduction, seqlabel, stats, taskclf, tasksets
from .corpus import FrequencyBand, SyntheticSpec, Task


def _sha256(path):
    import os

    digest = hashlib.sha256()
    if os.path.isdir(path):
        for root, _, files in sorted(os.walk(path)):
            for name in sorted(files):
                digest.update(name.encode("utf-8"))
                digest.update(_sha256(os.path.join(root, name)).encode("ascii"))
        return digest.hexdigest()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_path, subcommand, config, inputs, outputs, seeds, started, finished):
    manifest = {
        "schema": "run-manifest/1",
        "subcommand": subcommand,
        "config": config,
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "outputs": [str(p) for p in outputs],
        "seeds": list(seeds),
        "started": started,
        "finished": finished,
    }
    path = f"{out_path}.manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
    return path


def read_config_file(path):
    """Flat ``key = value`` lines; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected key = value")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def resolve(args, parser):
    """Merge config-file values under explicit flags (flags win)."""
    if not getattr(args, "config", None):
        return args
    file_values = read_config_file(args.config)
    for key, raw in file_values.items():
        if not hasattr(args, key):
            parser.error(f"unknown config key {key!r} in {args.config}")
        if getattr(args, key) is None:
            default = parser.get_default(key)
            # parse with the same type the flag would use
            if isinstance(default, bool) or raw.lower() in ("true", "false"):
                value = raw.lower() == "true"
            else:
                try:
                    value = int(raw)
                except ValueError:
                    try:
                        value = float(raw)
                    except ValueError:
                        value = raw
            setattr(args, key, value)
    return args


def _fill_defaults(args, defaults):
    for key, value in defaults.items():
        if getattr(args, key) is None:
            setattr(args, key, value)


def _parse_bands(text):
    try:
        return tuple(FrequencyBand(b.strip()) for b in text.split(",") if b.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_seeds(text):
    return tuple(int(s.strip()) for s in str(text).split(",") if s.strip())


def _parse_band_shift(pairs):
    shift = {}
    for pair in pairs or ():
        band, _, value = pair.partition("=")
        shift[FrequencyBand(band.strip())] = float(value)
    return shift


# -- subcommand implementations -------------------------------------------


def cmd_gen_corpus(args, parser):
    _fill_defaults(
        args,
        dict(nr=20, ar=20, participants=3, tokens_min=5, tokens_max=12,
             sigma=0.3, seed=0, electrodes="", shift=[]),
    )
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    electrodes = tuple(
        int(e) for e in str(args.electrodes).split(",") if str(e).strip()
    )
    spec = SyntheticSpec(
        n_sentences_nr=args.nr,
        n_sentences_ar=args.ar,
        tokens_per_sentence_range=(args.tokens_min, args.tokens_max),
        n_participants=args.participants,
        informative_electrodes=electrodes,
        band_shift=_parse_band_shift(args.shift),
        noise_sigma=args.sigma,
        seed=args.seed,
    )
    generated = corpus.generate_synthetic(spec)
    corpus.save_corpus(generated, args.out)
    config = {
        "nr": args.nr, "ar": args.ar, "participants": args.participants,
        "tokens_min": args.tokens_min, "tokens_max": args.tokens_max,
        "sigma": args.sigma, "electrodes": list(electrodes),
        "shift": {b.value: v for b, v in spec.band_shift.items()},
    }
    write_manifest(args.out, "gen-corpus", config, [], [args.out], [args.seed],
                   started, time.strftime("%Y-%m-%dT%H:%M:%S"))
    print(f"wrote {args.out}: {len(generated.sentences)} sentences, "
          f"{len(generated.records)} word records")
    return 0


def cmd_reduce(args, parser):
    _fill_defaults(args, dict(k=5, bands="theta,alpha,beta", seed=0, report=None))
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    try:
        bands = _parse_bands(args.bands) if isinstance(args.bands, str) else args.bands
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    if FrequencyBand.GAMMA in bands and not args.force:
        parser.error(
            "gamma-band embeddings are excluded by default (gamma activity "
            "tracks emotionality rather than attentiveness); pass --force "
            "to emit them anyway"
        )
    if args.k not in reduction.PAPER_K:
        print(f"warning: k={args.k} is outside the studied values "
              f"{reduction.PAPER_K}", file=sys.stderr)
    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        config = reduction.ReductionConfig(k=args.k, bands=bands, seed=args.seed)
    loaded = corpus.load_corpus(args.corpus)
    report, embeddings, _ = reduction.run_reduction(loaded, config)
    all_embeddings = embeddings["train"] + embeddings["dev"] + embeddings["test"]
    reduction.save_embeddings(all_embeddings, args.out)
    report_path = args.report or f"{args.out}.selection.json"
    reduction.save_selection_report(report, report_path)
    for band in config.bands:
        sel = report.selections[band]
        note = " (weak signal)" if sel.weak_signal else ""
        print(f"{band.value}: electrodes {list(sel.electrodes)}{note}")
    cfg = {"k": args.k, "bands": [b.value for b in bands], "force": bool(args.force)}
    write_manifest(args.out, "reduce", cfg, [args.corpus],
                   [args.out, report_path], [args.seed], started,
                   time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


def cmd_stats(args, parser):
    _fill_defaults(args, dict(bands="theta,alpha,beta", alpha=0.01, n_boot=2000, seed=0))
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    bands = _parse_bands(args.bands) if isinstance(args.bands, str) else args.bands
    loaded = corpus.load_corpus(args.corpus)
    results = []
    for band in bands:
        results.extend(
            stats.electrode_map(loaded, band, alpha=args.alpha,
                                n_boot=args.n_boot, seed=args.seed)
        )
    stats.write_electrode_map_tsv(results, loaded.electrode_labels, args.out)
    n_sig = sum(r.direction is not stats.Direction.NONE for r in results)
    print(f"wrote {args.out}: {len(results)} electrode tests, {n_sig} significant "
          f"at p < {args.alpha}")
    cfg = {"bands": [b.value for b in bands], "alpha": args.alpha, "n_boot": args.n_boot}
    write_manifest(args.out, "stats", cfg, [args.corpus], [args.out], [args.seed],
                   started, time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


def cmd_taskclf(args, parser):
    _fill_defaults(
        args,
        dict(label="task", mode="concat", band=None, average_participants=False,
             epochs=30, seed=0),
    )
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    loaded = corpus.load_corpus(args.corpus)
    embeddings = reduction.load_embeddings(args.embeddings)
    if args.mode == "band":
        if not args.band:
            parser.error("--mode band requires --band")
        band = FrequencyBand(args.band)
        embeddings = [e for e in embeddings if e.band is band]
    splits = reduction.split_corpus(loaded, seed=args.seed)
    split_ids = [set(part.sentences) for part in splits]

    def part_of(emb):
        for i, ids in enumerate(split_ids):
            if emb.sentence_id in ids:
                return i
        return -1

    per_split = ([], [], [])
    for emb in embeddings:
        idx = part_of(emb)
        if idx >= 0:
            per_split[idx].append(emb)
    datasets = [
        taskclf.assemble_dataset(
            part, loaded.sentences, label_kind=args.label,
            concat_bands=(args.mode == "concat"),
            average_participants=args.average_participants,
        )
        for part in per_split
    ]
    input_dim = datasets[0][0].matrix.shape[1]
    cfg = taskclf.TaskClfConfig(
        input_dim=input_dim, label_kind=args.label, epochs=args.epochs, seed=args.seed
    )
    clf, log = taskclf.train(cfg, datasets[0], datasets[1])
    result = taskclf.evaluate(clf, datasets[2])
    log_path = f"{args.out}.log.csv"
    taskclf.write_train_log(log, log_path, average_participants=args.average_participants)
    result_path = f"{args.out}.result.json"
    with open(result_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "label_kind": args.label,
                "input_dim": input_dim,
                "average_participants": bool(args.average_participants),
                "seed": args.seed,
                "test_accuracy": result.accuracy,
                "confusion": {"tp": result.tp, "fp": result.fp,
                              "fn": result.fn, "tn": result.tn},
            },
            fh,
            indent=1,
        )
    print(f"{args.label} classifier: input_dim {input_dim}, "
          f"test accuracy {result.accuracy:.3f}")
    cfg_out = {"label": args.label, "mode": args.mode, "band": args.band,
               "average_participants": bool(args.average_participants),
               "epochs": args.epochs, "input_dim": input_dim}
    write_manifest(args.out, "taskclf", cfg_out, [args.corpus, args.embeddings],
                   [log_path, result_path], [args.seed], started,
                   time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


def cmd_scores(args, parser):
    _fill_defaults(args, dict(source="eeg", band="theta", e=2.0, invert=False,
                              seed=0, default_fixation=None))
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    config = attnscore.ScalarConfig(e=args.e)
    inputs = []
    if args.source == "eeg":
        if not (args.embeddings and args.corpus):
            parser.error("--source eeg requires --embeddings and --corpus")
        loaded = corpus.load_corpus(args.corpus)
        embeddings = reduction.load_embeddings(args.embeddings)
        seqs = attnscore.eeg_scores(embeddings, loaded.sentences,
                                    FrequencyBand(args.band), config)
        inputs = [args.embeddings, args.corpus]
    else:
        if not args.sentences:
            parser.error(f"--source {args.source} requires --sentences")
        sentences = tasksets.load_labeled(args.sentences)
        inputs = [args.sentences]
        if args.source == "freq":
            if not args.freq_table:
                parser.error("--source freq requires --freq-table")
            table = attnscore.load_frequency_table(args.freq_table)
            seqs = attnscore.freq_inverse_scores(sentences, table, config)
            inputs.append(args.freq_table)
        elif args.source == "fixation":
            if not args.fixation_table:
                parser.error("--source fixation requires --fixation-table")
            table = {}
            with open(args.fixation_table, "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        token, value = line.rstrip("\n").split("\t")
                        table[token.lower()] = float(value)
            seqs = attnscore.fixation_scores(sentences, table, config,
                                             default=args.default_fixation)
            inputs.append(args.fixation_table)
        elif args.source == "oracle":
            if not args.keywords:
                parser.error("--source oracle requires --keywords")
            with open(args.keywords, "r", encoding="utf-8") as fh:
                keywords = {line.strip() for line in fh if line.strip()}
            seqs = attnscore.oracle_scores(sentences, keywords, config,
                                           invert=bool(args.invert))
            inputs.append(args.keywords)
        else:
            parser.error(f"unknown score source {args.source!r}")
    attnscore.save_scores(seqs, args.out)
    print(f"wrote {args.out}: {len(seqs)} score sequences ({args.source})")
    cfg_out = {"source": args.source, "band": args.band, "e": args.e,
               "invert": bool(args.invert)}
    write_manifest(args.out, "scores", cfg_out, inputs, [args.out], [args.seed],
                   started, time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


def cmd_gen_task(args, parser):
    _fill_defaults(
        args,
        dict(vocab=1000, train=2000, dev=400, test=400, positive_rate=0.2,
             keywords=20, length_min=5, length_max=15, noise=0.0, seed=0),
    )
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    spec = tasksets.SyntheticTaskSpec(
        vocab_size=args.vocab,
        n_train=args.train,
        n_dev=args.dev,
        n_test=args.test,
        positive_rate=args.positive_rate,
        n_keywords=args.keywords,
        length_range=(args.length_min, args.length_max),
        label_noise=args.noise,
        seed=args.seed,
    )
    task = tasksets.generate_task(spec)
    outputs = []
    for name, split in (("train", task.splits.train), ("dev", task.splits.dev),
                        ("test", task.splits.test)):
        path = f"{args.out}.{name}.jsonl"
        tasksets.save_labeled(split, path)
        outputs.append(path)
    kw_path = f"{args.out}.keywords.txt"
    with open(kw_path, "w", encoding="utf-8") as fh:
        for kw in sorted(task.keywords):
            fh.write(kw + "\n")
    outputs.append(kw_path)
    freq_path = f"{args.out}.freq.tsv"
    attnscore.save_frequency_table(task.token_frequencies, freq_path)
    outputs.append(freq_path)
    print(tasksets.summarize(task.splits))
    write_manifest(f"{args.out}.train.jsonl", "gen-task", asdict(spec), [],
                   outputs, [args.seed], started, time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


def cmd_train(args, parser):
    _fill_defaults(args, dict(aux="none", aux_ratio=1, epochs=10, seeds="1,2,3,4,5",
                              embed_dim=64, hidden=50, attn_hidden=50))
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    train_set = tasksets.load_labeled(args.train)
    dev_set = tasksets.load_labeled(args.dev)
    seeds = _parse_seeds(args.seeds)
    aux = []
    inputs = [args.train, args.dev]
    aux_ratio = args.aux_ratio
    if args.aux and args.aux != "none":
        aux = attnscore.load_scores(args.aux)
        inputs.append(args.aux)
    else:
        aux_ratio = 0
    config = seqlabel.SeqModelConfig(
        embed_dim=args.embed_dim, hidden=args.hidden, attn_hidden=args.attn_hidden,
        epochs=args.epochs, aux_ratio=aux_ratio, seeds=seeds,
    )
    outputs = []
    results = []
    for seed in seeds:
        model, log = seqlabel.train_multitask(config, train_set, dev_set, aux, seed=seed)
        ckpt = f"{args.out}.seed{seed}.ckpt"
        model.save(ckpt)
        log_path = f"{args.out}.seed{seed}.log.csv"
        seqlabel.write_multitask_log(log, log_path)
        outputs += [ckpt, log_path]
        best = max((row.dev_f1 for row in log), default=float("nan"))
        results.append({"seed": seed, "best_dev_f1": best})
        print(f"seed {seed}: best dev F1 {best:.4f} -> {ckpt}")
    seqlabel.write_run_manifest(f"{args.out}.run.json", config, seeds, inputs, results)
    write_manifest(f"{args.out}.run.json", "train",
                   {**asdict(config), "aux": args.aux}, inputs,
                   outputs + [f"{args.out}.run.json"], seeds, started,
                   time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


def cmd_eval(args, parser):
    _fill_defaults(args, dict(source="model", threshold=0.5))
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    test_set = tasksets.load_labeled(args.test)
    rows = []
    for ckpt in args.model:
        model = seqlabel.AttentionClassifier.load(ckpt)
        result = seqlabel.evaluate(model, test_set, threshold=args.threshold)
        rows.append((args.source, result.precision, result.recall, result.f1,
                     model.seed))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "precision", "recall", "f1", "seed"])
        for source, p, r, f1, seed in rows:
            writer.writerow([source, f"{p:.6f}", f"{r:.6f}", f"{f1:.6f}", seed])
    for source, p, r, f1, seed in rows:
        print(f"{source} seed {seed}: P {p:.4f} R {r:.4f} F1 {f1:.4f}")
    write_manifest(args.out, "eval", {"source": args.source, "threshold": args.threshold},
                   list(args.model) + [args.test], [args.out],
                   [], started, time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


def cmd_report(args, parser):
    _fill_defaults(args, dict(kind="seqlabel"))
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    if args.kind == "seqlabel":
        rows = []
        for path in args.inputs:
            with open(path, "r", encoding="utf-8", newline="") as fh:
                rows.extend(list(csv.DictReader(fh)))
        by_source = {}
        for row in rows:
            by_source.setdefault(row["source"], []).append(row)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["source", "n_seeds", "precision_mean", "precision_std",
                 "recall_mean", "recall_std", "f1_mean", "f1_std"]
            )
            for source in sorted(by_source):
                group = by_source[source]
                cols = {
                    key: np.array([float(r[key]) for r in group])
                    for key in ("precision", "recall", "f1")
                }
                writer.writerow(
                    [source, len(group)]
                    + [f"{cols[k].mean():.6f}" for k in ("precision",)]
                    + [f"{cols['precision'].std():.6f}"]
                    + [f"{cols['recall'].mean():.6f}", f"{cols['recall'].std():.6f}"]
                    + [f"{cols['f1'].mean():.6f}", f"{cols['f1'].std():.6f}"]
                )
    else:  # taskclf report: task x input_dim accuracy grid
        results = []
        for path in args.inputs:
            with open(path, "r", encoding="utf-8") as fh:
                results.append(json.load(fh))
        dims = sorted({r["input_dim"] for r in results})
        kinds = sorted({r["label_kind"] for r in results})
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label_kind"] + [str(d) for d in dims])
            for kind in kinds:
                row = [kind]
                for dim in dims:
                    accs = [r["test_accuracy"] for r in results
                            if r["label_kind"] == kind and r["input_dim"] == dim]
                    row.append(f"{np.mean(accs):.4f}" if accs else "")
                writer.writerow(row)
    print(f"wrote {args.out}")
    write_manifest(args.out, "report", {"kind": args.kind}, list(args.inputs),
                   [args.out], [], started, time.strftime("%Y-%m-%dT%H:%M:%S"))
    return 0


# -- parser ----------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eegattn",
        description="EEG band-power reduction and attention-supervised "
                    "sequence classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="generate a synthetic reading corpus")
    p.add_argument("--nr", type=int, help="number of NR sentences")
    p.add_argument("--ar", type=int, help="number of AR sentences")
    p.add_argument("--participants", type=int)
    p.add_argument("--tokens-min", type=int, dest="tokens_min")
    p.add_argument("--tokens-max", type=int, dest="tokens_max")
    p.add_argument("--sigma", type=float, help="baseline power noise sigma")
    p.add_argument("--electrodes", help="comma-separated informative electrodes")
    p.add_argument("--shift", action="append",
                   help="band=value power shift for AR, repeatable")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("reduce", help="select electrodes and emit embeddings")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--bands", help="comma-separated bands (theta,alpha,beta,gamma)")
    p.add_argument("--force", action="store_true",
                   help="allow gamma-band embeddings")
    p.add_argument("--seed", type=int)
    p.add_argument("--report", help="selection report path")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("stats", help="per-electrode NR/AR bootstrap test map")
    p.add_argument("--corpus", required=True)
    p.add_argument("--bands")
    p.add_argument("--alpha", type=float)
    p.add_argument("--n-boot", type=int, dest="n_boot")
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("taskclf", help="train the NR/AR (or session) classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--label", choices=["task", "session"])
    p.add_argument("--mode", choices=["concat", "band"])
    p.add_argument("--band")
    p.add_argument("--average-participants", action="store_true",
                   dest="average_participants")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_taskclf)

    p = sub.add_parser("scores", help="produce attention supervision scalars")
    p.add_argument("--source", choices=["eeg", "freq", "oracle", "fixation"])
    p.add_argument("--embeddings")
    p.add_argument("--corpus")
    p.add_argument("--band")
    p.add_argument("--sentences", help="labeled-sentence JSONL")
    p.add_argument("--freq-table", dest="freq_table")
    p.add_argument("--fixation-table", dest="fixation_table")
    p.add_argument("--default-fixation", type=float, dest="default_fixation")
    p.add_argument("--keywords")
    p.add_argument("--invert", action="store_true",
                   help="oracle only: score non-keywords high")
    p.add_argument("--e", type=float, help="damping constant")
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scores)

    p = sub.add_parser("gen-task", help="generate a synthetic keyword task")
    p.add_argument("--vocab", type=int)
    p.add_argument("--train", type=int)
    p.add_argument("--dev", type=int)
    p.add_argument("--test", type=int)
    p.add_argument("--positive-rate", type=float, dest="positive_rate")
    p.add_argument("--keywords", type=int)
    p.add_argument("--length-min", type=int, dest="length_min")
    p.add_argument("--length-max", type=int, dest="length_max")
    p.add_argument("--noise", type=float, help="label flip probability")
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_gen_task)

    p = sub.add_parser("train", help="train the attention-supervised classifier")
    p.add_argument("--train", required=True)
    p.add_argument("--dev", required=True)
    p.add_argument("--aux", help="score JSONL, or 'none'")
    p.add_argument("--aux-ratio", type=int, dest="aux_ratio")
    p.add_argument("--epochs", type=int)
    p.add_argument("--embed-dim", type=int, dest="embed_dim")
    p.add_argument("--hidden", type=int)
    p.add_argument("--attn-hidden", type=int, dest="attn_hidden")
    p.add_argument("--seeds", help="comma-separated seeds")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate checkpoints on a test set")
    p.add_argument("--model", nargs="+", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--source", help="label for the source column")
    p.add_argument("--threshold", type=float)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="aggregate multi-seed results")
    p.add_argument("--kind", choices=["seqlabel", "taskclf"])
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args, parser)
        return args.func(args, parser)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
