#!/usr/bin/env python3
"""Rebuilds formatter_cache.json from responses.json and prompt_template.txt.

Keys follow the formatter: sha256 of "<incident_id>\x1f<template>" for the
first request and the same material plus "\x1freprompt" for the repair request.
"""
import hashlib
import json
import pathlib

here = pathlib.Path(__file__).parent
template = (here / "prompt_template.txt").read_text(encoding="utf-8")
responses = json.loads((here / "responses.json").read_text(encoding="utf-8"))

entries = {}
for incident_id, answers in responses.items():
    material = f"{incident_id}\x1f{template}"
    entries[hashlib.sha256(material.encode()).hexdigest()] = answers["response"]
    if "reprompt" in answers:
        repair = material + "\x1freprompt"
        entries[hashlib.sha256(repair.encode()).hexdigest()] = answers["reprompt"]

out = json.dumps({"entries": dict(sorted(entries.items()))}, indent=2, ensure_ascii=False)
(here / "formatter_cache.json").write_text(out + "\n", encoding="utf-8")
