"""Optional semantic scoring of open-ended responses.

Greedy token-embedding matching between a response and its reference, in the
style of BERTScore: every token is paired with its most similar token on the
other side, precision averages over response tokens, recall over reference
tokens. Reads the eval and response files written by the kg2ft CLI and writes
the same report schema as ``kg2ft eval``, so ``kg2ft stats --report`` prints it.

    python -m kg2ft.semantic --dataset eval_fact_open.jsonl \\
        --responses responses.jsonl --model microsoft/deberta-xlarge-mnli \\
        --batch-size 16 --report report.json
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

DEFAULT_MODEL = "microsoft/deberta-xlarge-mnli"

# Hidden layer used per model, following the usual BERTScore choices; other
# models use their last layer.
_LAYERS = {
    "microsoft/deberta-xlarge-mnli": 40,
    "roberta-large": 17,
    "bert-base-uncased": 9,
    "distilbert-base-uncased": 5,
}

# Maps a batch of texts to one (tokens x dim) array per text, rows L2-normalized.
Embedder = Callable[[Sequence[str]], list]


class SemanticError(Exception):
    """Error with the same code names as the C++ core."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass
class OpenItem:
    sample_id: int
    answer: str
    task: str


def load_eval(path: str) -> list[OpenItem]:
    items = []
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise SemanticError("Io", f"cannot open {path}: {e.strerror}") from e
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            if rec.get("format") != "open":
                raise SemanticError(
                    "FormatMismatch",
                    f"{path} line {n}: only open-ended records can be scored semantically",
                )
            items.append(OpenItem(int(rec["id"]), str(rec["answer"]), str(rec.get("task", ""))))
        except (ValueError, KeyError, TypeError) as e:
            raise SemanticError("MalformedSample", f"{path} line {n}: {e}") from e
    return items


def load_responses(path: str) -> dict[int, str]:
    out: dict[int, str] = {}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise SemanticError("Io", f"cannot open {path}: {e.strerror}") from e
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            sid = int(rec["sample_id"])
            if "response" not in rec or not isinstance(rec["response"], str):
                raise SemanticError(
                    "FormatMismatch", f"{path} line {n}: open-ended scoring needs a text response"
                )
        except (ValueError, KeyError, TypeError) as e:
            raise SemanticError("MalformedSample", f"{path} line {n}: {e}") from e
        if sid in out:
            raise SemanticError("MalformedSample", f"{path} line {n}: duplicate sample_id {sid}")
        out[sid] = rec["response"]
    return out


def align(items: list[OpenItem], responses: dict[int, str]) -> list[str]:
    known = {it.sample_id for it in items}
    unknown = sorted(set(responses) - known)
    if unknown:
        raise SemanticError("FormatMismatch", f"response for unknown sample_id {unknown[0]}")
    missing = [it.sample_id for it in items if it.sample_id not in responses]
    if missing:
        shown = ", ".join(str(i) for i in missing[:10])
        more = " ..." if len(missing) > 10 else ""
        raise SemanticError(
            "MissingResponse", f"{len(missing)} sample(s) without a response, ids: {shown}{more}"
        )
    return [responses[it.sample_id] for it in items]


def greedy_match(cand: np.ndarray, ref: np.ndarray) -> tuple[float, float, float]:
    """P, R, F1 of greedy cosine matching; rows of both inputs are unit vectors."""
    if len(cand) == 0 or len(ref) == 0:
        same = len(cand) == len(ref)
        return (1.0, 1.0, 1.0) if same else (0.0, 0.0, 0.0)
    sim = cand @ ref.T
    # Cosines can dip below zero; the shared schema keeps scores in [0, 1].
    p = float(np.clip(sim.max(axis=1).mean(), 0.0, 1.0))
    r = float(np.clip(sim.max(axis=0).mean(), 0.0, 1.0))
    f = 0.0 if p + r == 0.0 else 2.0 * p * r / (p + r)
    return p, r, min(f, 1.0)


class HfEmbedder:
    """Contextual token embeddings from a Hugging Face encoder, on CPU."""

    def __init__(self, model_name: str, batch_size: int = 16, layer: Optional[int] = None):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer

            self._tokenizer = AutoTokenizer.from_pretrained(model_name)
            self._model = AutoModel.from_pretrained(model_name)
        except Exception as e:  # missing package, unknown name, no network
            raise SemanticError("ModelUnavailable", f"{model_name}: {e}") from e
        self._torch = torch
        self._model.eval()
        self._batch_size = max(1, batch_size)
        self._layer = layer if layer is not None else _LAYERS.get(model_name)

    def __call__(self, texts: Sequence[str]) -> list:
        torch = self._torch
        out = []
        for start in range(0, len(texts), self._batch_size):
            batch = list(texts[start : start + self._batch_size])
            enc = self._tokenizer(
                batch,
                padding=True,
                truncation=True,
                return_tensors="pt",
                return_special_tokens_mask=True,
            )
            special = enc.pop("special_tokens_mask")
            with torch.no_grad():
                res = self._model(**enc, output_hidden_states=True)
            states = res.hidden_states
            hidden = states[self._layer] if self._layer is not None else states[-1]
            hidden = torch.nn.functional.normalize(hidden, dim=-1)
            for i in range(len(batch)):
                keep = (enc["attention_mask"][i] == 1) & (special[i] == 0)
                out.append(hidden[i][keep].numpy().astype(np.float64))
        return out


def score_pairs(
    candidates: Sequence[str], references: Sequence[str], embed: Embedder
) -> list[tuple[float, float, float]]:
    emb = embed(list(candidates) + list(references))
    n = len(candidates)
    return [greedy_match(emb[i], emb[n + i]) for i in range(n)]


def score_semantic(
    eval_file: str,
    responses_file: str,
    model_name: str = DEFAULT_MODEL,
    out_file: Optional[str] = None,
    batch_size: int = 16,
    embed: Optional[Embedder] = None,
) -> dict:
    """Scores every open-ended item; returns (and optionally writes) the report."""
    items = load_eval(eval_file)
    responses = align(items, load_responses(responses_file))
    if embed is None:
        embed = HfEmbedder(model_name, batch_size)
    scores = score_pairs(responses, [it.answer for it in items], embed) if items else []
    samples = [
        {"sample_id": it.sample_id, "precision": p, "recall": r, "f1": f}
        for it, (p, r, f) in zip(items, scores)
    ]
    tasks = {it.task for it in items}

    def mean(i: int) -> Optional[float]:
        return float(np.mean([s[i] for s in scores])) if scores else None

    report = {
        "metric": "bertscore",
        "task": tasks.pop() if len(tasks) == 1 else "",
        "format": "open",
        "n": len(samples),
        "accuracy": None,
        "precision": mean(0),
        "recall": mean(1),
        "f1": mean(2),
        "samples": samples,
    }
    if out_file:
        with open(out_file, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
    return report


def summary(report: dict) -> str:
    where = f"{report['task']}/{report['format']}" if report["task"] else report["format"]
    parts = [f"{report['metric']} on {where} (n={report['n']}):"]
    for key, name in (("precision", "P"), ("recall", "R"), ("f1", "F1")):
        if report[key] is not None:
            parts.append(f"{name} {report[key]:.3f}")
    return " ".join(parts)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="python -m kg2ft.semantic", description=__doc__.split("\n")[0])
    ap.add_argument("--dataset", required=True, help="eval_*_open.jsonl from kg2ft build")
    ap.add_argument("--responses", required=True, help="response file, one JSON object per line")
    ap.add_argument("--model", default=DEFAULT_MODEL, help="Hugging Face encoder name or path")
    ap.add_argument("--batch-size", type=int, default=16, help="texts per forward pass")
    ap.add_argument("--layer", type=int, default=None, help="hidden layer (default per model)")
    ap.add_argument("--report", default=None, help="write the JSON score report here")
    args = ap.parse_args(argv)
    try:
        # Input errors surface before a model is loaded.
        items = load_eval(args.dataset)
        align(items, load_responses(args.responses))
        embed = HfEmbedder(args.model, args.batch_size, args.layer) if items else (lambda t: [])
        report = score_semantic(
            args.dataset, args.responses, args.model, args.report, args.batch_size, embed
        )
    except SemanticError as e:
        rec = {"level": "error", "event": "error", "code": e.code, "message": e.message}
        print(json.dumps(rec), file=sys.stderr)
        return 1
    print(summary(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
