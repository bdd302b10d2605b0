"""Command-line entry point orchestrating the full pipeline.

Exit codes: 0 success, 1 usage error, 2 data error. Every artifact-producing
command writes a run manifest recording its configuration, seed, inputs,
outputs and wall-clock time so runs can be reproduced.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone

from . import __version__
from .alphabet import Alphabet
from .bundle import attach_student, canonical_json, config_digest, load_bundle, save_bundle
from .corpus import (extract_pairs, load_accounts, load_pairs, load_passwords,
                     write_pairs)
from .distill import DistillConfig, distill
from .errors import CandidateLimitError, DataError
from .expert import NGramConfig
from .features import feature_matrix, fit_standardizer
from .clustering import kmeans, select_k
from .offline import (GenerationConfig, crack_curve, estimate_guess_number,
                      generate, train_offline, write_candidates)
from .online import beam_search, online_crack_rate, train_online


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def _parse_budgets(text: str) -> list[int]:
    return [int(float(b)) for b in text.split(",")]


def write_run_manifest(out_path, command: str, config: dict, seed,
                       inputs, outputs, started: float) -> None:
    manifest = {
        "command": command,
        "config": config,
        "config_digest": config_digest(config),
        "seed": seed,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "started_utc": datetime.fromtimestamp(started, tz=timezone.utc).isoformat(),
        "wall_clock_s": round(time.time() - started, 3),
        "version": __version__,
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(manifest))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mope", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap for parallel sections")

    p = sub.add_parser("cluster", help="fit features + k selection + k-means")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="report output path (JSON)")
    p.add_argument("--k-range", type=_parse_range, default=(2, 10))
    p.add_argument("--step", type=int, default=5)
    p.add_argument("--tau", type=float, default=0.5)
    common(p)

    p = sub.add_parser("train-offline", help="train the offline mixture bundle")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="bundle directory")
    p.add_argument("--k", type=int)
    p.add_argument("--k-range", type=_parse_range, default=(2, 10))
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--lam", type=float, default=0.01)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float, default=10.0)
    common(p)

    p = sub.add_parser("train-online", help="train the online transform bundle")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--k-range", type=_parse_range, default=(2, 10))
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--lam", type=float, default=0.001)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float, default=2.5)
    p.add_argument("--beam-width", type=int, default=150)
    p.add_argument("--candidates", type=int, default=150)
    p.add_argument("--max-ed", type=int, default=4)
    common(p)

    p = sub.add_parser("generate", help="enumerate candidates from a bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tau-gen", type=float, required=True)
    p.add_argument("--lmin", type=int, default=1)
    p.add_argument("--lmax", type=int, default=16)
    p.add_argument("--hard-cap", type=int, default=10_000_000)
    common(p, seed=False)

    p = sub.add_parser("guess-number", help="Monte-Carlo guess numbers")
    p.add_argument("--model", required=True)
    p.add_argument("--password", action="append", default=[])
    p.add_argument("--in", dest="infile")
    p.add_argument("--out")
    p.add_argument("--samples", type=int, default=10_000)
    common(p)

    p = sub.add_parser("crack-eval", help="crack-rate curve over budgets")
    p.add_argument("--model", action="append", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--budgets", type=_parse_budgets, default=[10**3, 10**6, 10**9])
    p.add_argument("--min-auto", action="store_true")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--out")
    common(p)

    p = sub.add_parser("pairs", help="extract source/target pairs per account")
    p.add_argument("--in", dest="infile", required=True,
                   help="TSV of account_key<TAB>password")
    p.add_argument("--out", required=True)
    p.add_argument("--max-ed", type=int, default=4)
    common(p, seed=False)

    p = sub.add_parser("beam", help="online candidates for source passwords")
    p.add_argument("--model", required=True)
    p.add_argument("--src", action="append", default=[])
    p.add_argument("--in", dest="infile")
    p.add_argument("--out")
    p.add_argument("--beam-width", type=int)
    p.add_argument("--candidates", type=int)
    common(p, seed=False)

    p = sub.add_parser("online-eval", help="online crack rate on test pairs")
    p.add_argument("--model", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--budgets", type=_parse_budgets, default=[10, 100])
    p.add_argument("--out")
    common(p, seed=False)

    p = sub.add_parser("distill", help="distill a bundle into a student expert")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--alpha", type=float, default=0.7)
    p.add_argument("--temperature", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=20_000)
    common(p)

    p = sub.add_parser("serve", help="run the strength meter service")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8342)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--pool-size", type=int, default=10_000)
    common(p)

    p = sub.add_parser("inspect", help="print bundle manifest and cluster stats")
    p.add_argument("--model", required=True)
    return parser


def _cmd_cluster(args) -> int:
    started = time.time()
    alphabet = Alphabet.printable_ascii()
    corpus = load_passwords(args.infile, alphabet)
    feats = feature_matrix(corpus.passwords())
    std = fit_standardizer(feats)
    report = select_k(std.transform(feats), args.k_range, args.tau,
                      seed=args.seed, step=args.step)
    model = kmeans(std.transform(feats), report.k_star, seed=args.seed, standardizer=std)
    sizes = [int((model.labels == j).sum()) for j in range(model.k)]
    payload = {
        "k_star": report.k_star,
        "threshold_met": report.threshold_met,
        "tau": report.tau,
        "scores": {str(k): v for k, v in report.scores.items()},
        "cluster_sizes": sizes,
        "rejected_lines": dict(corpus.rejected),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload))
    write_run_manifest(f"{args.out}.run.json", "cluster",
                       {"k_range": list(args.k_range), "tau": args.tau,
                        "step": args.step},
                       args.seed, [args.infile], [args.out], started)
    print(f"k* = {report.k_star} (threshold_met={report.threshold_met})")
    return 0


def _cmd_train_offline(args) -> int:
    started = time.time()
    alphabet = Alphabet.printable_ascii()
    corpus = load_passwords(args.infile, alphabet)
    cfg = NGramConfig(order=args.order, lam=args.lam, gamma=args.gamma)
    result = train_offline(corpus.passwords(), alphabet, cfg=cfg, beta=args.beta,
                           k=args.k, k_range=args.k_range, tau=args.tau,
                           step=args.step, seed=args.seed)
    extras = {"cluster_sizes": result.cluster_sizes, "train_passwords": len(corpus)}
    save_bundle(args.out, result.model, result.base, extras=extras)
    config = {"order": args.order, "lam": args.lam, "gamma": args.gamma,
              "beta": args.beta, "k": result.model.k}
    write_run_manifest(f"{args.out}/run_manifest.json", "train-offline", config,
                       args.seed, [args.infile], [args.out], started)
    print(f"offline bundle written to {args.out} (k={result.model.k})")
    return 0


def _cmd_train_online(args) -> int:
    started = time.time()
    alphabet = Alphabet.printable_ascii()
    pairs = load_pairs(args.pairs, alphabet, max_ed=args.max_ed)
    cfg = NGramConfig(order=3, lam=args.lam, gamma=args.gamma)
    result = train_online(pairs.records, alphabet, cfg=cfg, beta=args.beta,
                          k=args.k, k_range=args.k_range, tau=args.tau,
                          step=args.step, seed=args.seed,
                          beam_width=args.beam_width, top_k=args.candidates,
                          max_ops=args.max_ed)
    extras = {"cluster_sizes": result.cluster_sizes, "train_pairs": len(pairs)}
    save_bundle(args.out, result.model, result.base, extras=extras)
    config = {"lam": args.lam, "beta": args.beta, "beam_width": args.beam_width,
              "max_ed": args.max_ed, "k": result.model.k}
    write_run_manifest(f"{args.out}/run_manifest.json", "train-online", config,
                       args.seed, [args.pairs], [args.out], started)
    print(f"online bundle written to {args.out} (k={result.model.k})")
    return 0


def _cmd_generate(args) -> int:
    started = time.time()
    bundle = load_bundle(args.model)
    if bundle.variant != "offline":
        raise DataError("generate needs an offline bundle")
    cfg = GenerationConfig(tau=args.tau_gen, l_min=args.lmin, l_max=args.lmax)
    cands = generate(bundle.model, cfg, hard_cap=args.hard_cap)
    write_candidates(args.out, cands)
    write_run_manifest(f"{args.out}.run.json", "generate",
                       {"tau_gen": args.tau_gen, "lmin": args.lmin,
                        "lmax": args.lmax}, None,
                       [args.model], [args.out], started)
    print(f"{len(cands)} candidates -> {args.out}")
    return 0


def _cmd_guess_number(args) -> int:
    started = time.time()
    bundle = load_bundle(args.model)
    model = bundle.meter_model
    passwords = list(args.password)
    if args.infile:
        passwords += load_passwords(args.infile, bundle.model.alphabet).passwords()
    if not passwords:
        raise DataError("no passwords given (use --password or --in)")
    rows = []
    for pwd in passwords:
        est = estimate_guess_number(model, pwd, args.samples, args.seed)
        rows.append((pwd, est.prob, est.guess_number, est.log10))
        print(f"{pwd}\t{est.guess_number:.6g}\t{est.log10:.3f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for pwd, prob, g, lg in rows:
                fh.write(f"{pwd}\t{prob:.17e}\t{g:.6g}\t{lg:.6f}\n")
        write_run_manifest(f"{args.out}.run.json", "guess-number",
                           {"samples": args.samples}, args.seed,
                           [args.model], [args.out], started)
    return 0


def _cmd_crack_eval(args) -> int:
    started = time.time()
    bundles = [load_bundle(m) for m in args.model]
    alphabet = bundles[0].model.alphabet
    test = load_passwords(args.test, alphabet)
    models = [b.model for b in bundles]
    mode = "min_auto" if args.min_auto else "single"
    fractions = crack_curve(models, test.passwords(), args.budgets, mode=mode,
                            n_samples=args.samples, seed=args.seed,
                            threads=args.threads)
    payload = {"budgets": args.budgets, "fractions": fractions, "mode": mode}
    print(json.dumps(payload))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(payload))
        write_run_manifest(f"{args.out}.run.json", "crack-eval",
                           {"budgets": args.budgets, "mode": mode,
                            "samples": args.samples},
                           args.seed, list(args.model) + [args.test],
                           [args.out], started)
    return 0


def _cmd_pairs(args) -> int:
    started = time.time()
    alphabet = Alphabet.printable_ascii()
    accounts = load_accounts(args.infile, alphabet)
    pairs = extract_pairs(accounts.records, max_ed=args.max_ed)
    write_pairs(args.out, pairs)
    write_run_manifest(f"{args.out}.run.json", "pairs", {"max_ed": args.max_ed},
                       None, [args.infile], [args.out], started)
    print(f"{len(pairs)} pairs -> {args.out}")
    return 0


def _cmd_beam(args) -> int:
    started = time.time()
    bundle = load_bundle(args.model)
    if bundle.variant != "online":
        raise DataError("beam needs an online bundle")
    sources = list(args.src)
    if args.infile:
        sources += load_passwords(args.infile, bundle.model.alphabet).passwords()
    if not sources:
        raise DataError("no source passwords given (use --src or --in)")
    lines = []
    for src in sources:
        ranked = beam_search(bundle.model, src, beam_width=args.beam_width,
                             top_k=args.candidates)
        for rank, (cand, score) in enumerate(ranked, 1):
            lines.append(f"{src}\t{rank}\t{cand}\t{score:.17e}")
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        write_run_manifest(f"{args.out}.run.json", "beam", {}, None,
                           [args.model], [args.out], started)
    else:
        print(text)
    return 0


def _cmd_online_eval(args) -> int:
    started = time.time()
    bundle = load_bundle(args.model)
    if bundle.variant != "online":
        raise DataError("online-eval needs an online bundle")
    pairs = load_pairs(args.pairs, bundle.model.alphabet,
                       max_ed=bundle.model.max_ops)
    rates = online_crack_rate(bundle.model, pairs.records, args.budgets,
                              threads=args.threads)
    payload = {"budgets": args.budgets, "rates": {str(b): r for b, r in rates.items()}}
    print(json.dumps(payload))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(payload))
        write_run_manifest(f"{args.out}.run.json", "online-eval",
                           {"budgets": args.budgets}, None,
                           [args.model, args.pairs], [args.out], started)
    return 0


def _cmd_distill(args) -> int:
    started = time.time()
    bundle = load_bundle(args.model)
    if bundle.variant != "offline":
        raise DataError("distill needs an offline bundle")
    corpus = load_passwords(args.corpus, bundle.model.alphabet)
    cfg = DistillConfig(alpha=args.alpha, temperature=args.temperature,
                        sample_count=args.samples)
    student = distill(bundle.model, corpus.passwords(), cfg, seed=args.seed)
    attach_student(args.model, student)
    write_run_manifest(f"{args.model}/distill_manifest.json", "distill",
                       {"alpha": args.alpha, "temperature": args.temperature,
                        "samples": args.samples},
                       args.seed, [args.corpus], [f"{args.model}/student.bin"],
                       started)
    print(f"student written into {args.model}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(args.model, port=args.port, host=args.host,
          pool_size=args.pool_size, seed=args.seed)
    return 0


def _cmd_inspect(args) -> int:
    bundle = load_bundle(args.model)
    m = bundle.manifest
    print(f"variant: {m['variant']}")
    print(f"alphabet: {len(m['alphabet'])} symbols")
    print(f"k: {m['k']}  beta: {m['beta']}  order: {m['order']}  lambda: {m['lambda']}")
    print(f"student: {'yes' if bundle.student is not None else 'no'}")
    extras = m.get("extras") or {}
    if "cluster_sizes" in extras:
        sizes = extras["cluster_sizes"]
        print(f"cluster sizes: min={min(sizes)} max={max(sizes)} n={len(sizes)}")
    for key, val in sorted(extras.items()):
        if key != "cluster_sizes":
            print(f"{key}: {val}")
    return 0


_HANDLERS = {
    "cluster": _cmd_cluster,
    "train-offline": _cmd_train_offline,
    "train-online": _cmd_train_online,
    "generate": _cmd_generate,
    "guess-number": _cmd_guess_number,
    "crack-eval": _cmd_crack_eval,
    "pairs": _cmd_pairs,
    "beam": _cmd_beam,
    "online-eval": _cmd_online_eval,
    "distill": _cmd_distill,
    "serve": _cmd_serve,
    "inspect": _cmd_inspect,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract reserves 2 for data errors
        return 0 if exc.code in (0, None) else 1
    try:
        return _HANDLERS[args.command](args)
    except (DataError, CandidateLimitError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
