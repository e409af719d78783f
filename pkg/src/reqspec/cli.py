"""Command-line interface.

Subcommands: serve, chat, extract, synth, eval, kb, guard. Exit codes:
0 success, 1 user error (bad arguments or input files), 2 internal error.
The chat REPL drives the same engine as the HTTP service; with --json it
prints each reply as one JSON line, which is the byte-identical payload
the server returns in its "reply" field.
"""

from __future__ import annotations

import json
import sys

import click

from .config import load_config
from .errors import ReqspecError
from .evalmetrics import dld as _dld
from .evalmetrics import evaluate
from .extract import LexiconTagger, load_comparator_lexicon, refine
from .guard import train_validator, validate
from .knowledge import ingest_annotations, load_kb, load_seed_kb, save_kb
from .reqmodel import KeyKind, Requirement, SlotSet, tokenize
from .server import build_engine
from .synth import SynthesisConfig, load_exclusions, synthesize, write_jsonl

KIND_COLORS = {
    "entity": "cyan",
    "quantifier": "magenta",
    "location": "green",
    "time": "yellow",
    "condition": "red",
}


def _load_kb_arg(path):
    return load_kb(path) if path else load_seed_kb()


@click.group()
def cli():
    """Convert English city requirements into formal specifications."""


@cli.command()
@click.option("--host", default=None, help="listen address")
@click.option("--port", type=int, default=None, help="listen port")
@click.option("--kb", "kb_path", default=None, help="knowledge base JSONL")
@click.option("--static-dir", default=None, help="built frontend assets")
def serve(host, port, kb_path, static_dir):
    """Run the HTTP service."""
    from .server import serve as run_serve

    overrides = {}
    if host:
        overrides["listen_host"] = host
    if port:
        overrides["listen_port"] = port
    if kb_path:
        overrides["kb_path"] = kb_path
    if static_dir:
        overrides["static_dir"] = static_dir
    run_serve(load_config(**overrides))


@cli.command()
@click.option("--kb", "kb_path", default=None, help="knowledge base JSONL")
@click.option("--json", "as_json", is_flag=True,
              help="print replies as JSON lines")
def chat(kb_path, as_json):
    """Interactive clarification dialogue on the terminal."""
    overrides = {"kb_path": kb_path} if kb_path else {}
    engine = build_engine(load_config(**overrides))
    session = engine.start_session()
    if not as_json:
        click.echo("Type a requirement (blank line or Ctrl-D to quit).")
    for line in sys.stdin:
        text = line.strip()
        if not text:
            break
        reply = engine.handle_message(session, text)
        if as_json:
            click.echo(json.dumps(reply.to_dict(), sort_keys=True,
                                  ensure_ascii=False))
        else:
            _print_reply(reply)
    engine.end_session(session)


def _print_reply(reply):
    click.echo(click.style(f"[{reply.kind}] ", bold=True) + reply.text)
    if reply.proposal:
        click.echo("  template: " + reply.proposal["template_sentence"])
        click.echo("  formula:  " + reply.proposal["formula_text"])
        for kind, value in reply.proposal["slot_table"].items():
            if kind == "defaulted" or not value:
                continue
            click.echo("  " + click.style(f"{kind}: ",
                                          fg=KIND_COLORS.get(kind)) + str(value))


@cli.command("extract")
@click.option("--kb", "kb_path", default=None, help="knowledge base JSONL")
@click.option("--text", required=True, help="requirement sentence")
def extract_cmd(kb_path, text):
    """Tag a sentence and print its slot set."""
    kb = _load_kb_arg(kb_path)
    slots = LexiconTagger().tag(text, kb)
    refined = refine(slots, text, kb, load_comparator_lexicon())
    payload = {
        "text": text,
        "tokens": tokenize(text),
        "slots": refined.to_dict(),
        "issues": [
            {"kind": k.value, "phrase": p, "reason": r}
            for k, p, r in refined.issues
        ],
    }
    click.echo(json.dumps(payload, ensure_ascii=False, indent=2))


@cli.command()
@click.option("--lambda", "lam", type=int, default=5,
              help="minimum appearances per phrase")
@click.option("--seed", type=int, default=0)
@click.option("--kb", "kb_path", default=None, help="knowledge base JSONL")
@click.option("--exclude", "exclude_path", default=None,
              help="JSONL test corpus whose phrases/patterns must not appear")
@click.option("--out", "out_path", required=True, help="output JSONL")
def synth(lam, seed, kb_path, exclude_path, out_path):
    """Generate a labeled corpus from the knowledge base."""
    kb = _load_kb_arg(kb_path)
    exclude_phrases, exclude_patterns = (
        load_exclusions(exclude_path) if exclude_path
        else (frozenset(), frozenset()))
    cfg = SynthesisConfig(lam=lam, seed=seed,
                          exclude_phrases=exclude_phrases,
                          exclude_patterns=exclude_patterns)
    rows = synthesize(kb, cfg)
    write_jsonl(rows, out_path)
    click.echo(f"wrote {len(rows)} requirements to {out_path}")


def _load_corpus(path):
    items = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            tokens = record.get("tokens") or tokenize(record["text"])
            items.append((tokens, SlotSet.from_dict(record.get("slots", {}))))
    return items


@cli.group(invoke_without_command=True)
@click.option("--gold", "gold_path", default=None)
@click.option("--pred", "pred_path", default=None)
@click.pass_context
def eval(ctx, gold_path, pred_path):
    """Score a predicted corpus against gold annotations."""
    if ctx.invoked_subcommand is not None:
        return
    if not gold_path or not pred_path:
        raise click.UsageError("eval needs --gold and --pred")
    report = evaluate(_load_corpus(gold_path), _load_corpus(pred_path))
    click.echo(json.dumps(report.to_dict(), indent=2))


@eval.command("dld")
@click.option("--a", "path_a", required=True, type=click.Path(exists=True))
@click.option("--b", "path_b", required=True, type=click.Path(exists=True))
def eval_dld(path_a, path_b):
    """Edit distance between two text files."""
    with open(path_a, "r", encoding="utf-8") as fh:
        a = fh.read()
    with open(path_b, "r", encoding="utf-8") as fh:
        b = fh.read()
    click.echo(str(_dld(a.strip(), b.strip())))


@cli.group()
def kb():
    """Knowledge-base administration."""


@kb.command("stats")
@click.option("--kb", "kb_path", default=None)
def kb_stats_cmd(kb_path):
    click.echo(json.dumps(_load_kb_arg(kb_path).stats().to_dict(), indent=2))


@kb.command("ingest")
@click.argument("corpus", type=click.Path(exists=True))
@click.option("--kb", "kb_path", default=None, help="existing KB to extend")
@click.option("--out", "out_path", required=True, help="where to save the KB")
def kb_ingest(corpus, kb_path, out_path):
    """Fold an annotated JSONL corpus into a knowledge base."""
    base = _load_kb_arg(kb_path)
    reqs = []
    with open(corpus, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            req = Requirement(id=f"corpus-{lineno}", source_text=record["text"])
            req.slots = SlotSet.from_dict(record.get("slots", {}))
            reqs.append(req)
    report = ingest_annotations(base, reqs)
    save_kb(base, out_path)
    click.echo(f"added {report.terms_added} terms, "
               f"{report.patterns_added} patterns; "
               f"skipped {len(report.skipped)} entries")


@kb.command("export")
@click.option("--kb", "kb_path", default=None)
def kb_export(kb_path):
    """Print the KB in its JSONL wire format."""
    for record in _load_kb_arg(kb_path).records():
        click.echo(json.dumps(record, ensure_ascii=False))


@cli.group()
def guard():
    """Validation of new term-key pairs."""


@guard.command("validate")
@click.option("--term", required=True)
@click.option("--kind", "kind_name", required=True,
              type=click.Choice([k.value for k in KeyKind]))
@click.option("--kb", "kb_path", default=None)
@click.option("--threshold", type=float, default=0.5)
def guard_validate(term, kind_name, kb_path, threshold):
    validator = train_validator(_load_kb_arg(kb_path))
    verdict = validate(validator, term, KeyKind(kind_name), threshold)
    click.echo(json.dumps(verdict.to_dict(), ensure_ascii=False))


def main(argv=None) -> int:
    """Entry point with the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ReqspecError, OSError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception as exc:  # internal error
        click.echo(f"internal error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
