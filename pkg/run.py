#!/usr/bin/env python
# coding: utf-8

# # Acceptance Runs
# 
# ## 10/19/2026

# In[1]:


## Load Packages

# system
import time
from pathlib import Path

# python internal
import pandas as pd

# Project Packages
from fo2_trees.config_path import CONFIG_PATH, PACKAGE_ROOT, load_config
from fo2_trees.gf2 import Gf2Settings, gf2_sat_singular
from fo2_trees.helper import build_signature, calc_percent
from fo2_trees.io_utils import output_results
from fo2_trees.formula import pretty
from fo2_trees.oracle import brute_force_sat, random_sentences
from fo2_trees.reductions import evaluate_qbf, gen_qbf, random_qbf
from fo2_trees.solver import Mode, Outcome, SolverSettings, decide_sat


# In[2]:


## Load Configuration File and store its values

config = load_config(CONFIG_PATH)

solver_settings = SolverSettings.from_config(config["solver"])
gf2_settings = Gf2Settings.from_config(config["gf2"])
max_nodes = config["oracle"]["max_nodes"]

# Project Parameters
seed = config["batch"]["seed"]
corpus_size = config["batch"]["corpus_size"]
corpus_depth = config["batch"]["corpus_depth"]
predicates = ",".join(config["batch"]["predicates"])
guarded_corpus_size = config["batch"]["guarded_corpus_size"]
qbf_variables = config["batch"]["qbf_variables"]
qbf_instances = config["batch"]["qbf_instances"]

# File and folder paths
RESULTS_PATH = PACKAGE_ROOT / Path(config["batch"]["results_dir"])
RESULTS_FILE = RESULTS_PATH / Path(config["batch"]["results_file"])


# In[3]:


# Test configuation inputs
RESULTS_PATH.mkdir(parents=True, exist_ok=True)

if max_nodes < 1:
    raise ValueError(f"Value for oracle max_nodes, {max_nodes}, is invalid. Needs to be at least 1")


# In[4]:


# Differential corpus: full-type search against the brute-force oracle
##
sig = build_signature(predicates, "C,D,N,F")
rows = []
for i, f in enumerate(random_sentences(seed, corpus_size, sig, depth=corpus_depth)):
    start = time.perf_counter()
    verdict = decide_sat(f, sig, Mode.GENERAL, settings=solver_settings)
    elapsed = time.perf_counter() - start
    found = brute_force_sat(f, sig, max_nodes)
    rows.append({
        "Sentence"  : i,
        "Formula"   : pretty(f),
        "Verdict"   : verdict.outcome.value,
        "Oracle"    : "sat" if found is not None else "none",
        # sat without an oracle model is fine: the witness may be larger than max_nodes
        "Conflict"  : verdict.outcome is Outcome.UNSAT and found is not None,
        "Seconds"   : round(elapsed, 3),
    })
df_oracle = pd.DataFrame(rows)
##


# In[5]:


# QBF end to end: the guarded path search on the encoding against direct evaluation
##
rows = []
for k in qbf_variables:
    for j in range(qbf_instances):
        q = random_qbf(seed + j, k, clauses=max(1, 2 * k))
        generated = gen_qbf(q)
        start = time.perf_counter()
        verdict = gf2_sat_singular(generated.formula, generated.signature, gf2_settings)
        elapsed = time.perf_counter() - start
        expected = evaluate_qbf(q)
        rows.append({
            "Variables" : k,
            "Instance"  : j,
            "Expected"  : "sat" if expected else "unsat",
            "Verdict"   : verdict.outcome.value,
            "Conflict"  : verdict.outcome is not Outcome.UNKNOWN and verdict.is_sat != expected,
            "Seconds"   : round(elapsed, 3),
        })
df_qbf = pd.DataFrame(rows)
##


# In[6]:


# Engine agreement on guarded sentences over the descendant relation, singular mode
##
guarded_sig = build_signature(predicates, "D")
rows = []
for i, f in enumerate(random_sentences(seed, guarded_corpus_size, guarded_sig, depth=corpus_depth, guarded=True)):
    fo2 = decide_sat(f, guarded_sig, Mode.SINGULAR, settings=solver_settings)
    gf2 = gf2_sat_singular(f, guarded_sig, gf2_settings)
    decided = Outcome.UNKNOWN not in (fo2.outcome, gf2.outcome)
    rows.append({
        "Sentence"  : i,
        "Formula"   : pretty(f),
        "FO2"       : fo2.outcome.value,
        "GF2"       : gf2.outcome.value,
        "Conflict"  : decided and fo2.outcome is not gf2.outcome,
    })
df_engines = pd.DataFrame(rows)
##


# In[7]:


# Summary

summary_metrics = {
    "oracle_sentences"          : len(df_oracle),
    "oracle_decided_pct"        : calc_percent(int((df_oracle["Verdict"] != "unknown").sum()), len(df_oracle)),
    "oracle_conflicts"          : int(df_oracle["Conflict"].sum()),
    "qbf_instances"             : len(df_qbf),
    "qbf_decided_pct"           : calc_percent(int((df_qbf["Verdict"] != "unknown").sum()), len(df_qbf)),
    "qbf_conflicts"             : int(df_qbf["Conflict"].sum()),
    "engine_sentences"          : len(df_engines),
    "engine_conflicts"          : int(df_engines["Conflict"].sum()),
}

df_summary = pd.DataFrame({
    "Metric" : summary_metrics.keys(),
    "Value"  : summary_metrics.values(),
})
print(df_summary.to_string(index=False))


# In[ ]:


# Output results

append_today = config["batch"]["append_today"]
append_version = config["batch"]["append_version"]
output_results(df=df_summary, file_path=RESULTS_FILE, append_today=append_today, append_version=append_version, sheet_name="Summary")
output_results(df=df_oracle, file_path=RESULTS_FILE, append_today=append_today, append_version=append_version, sheet_name="Oracle")
output_results(df=df_qbf, file_path=RESULTS_FILE, append_today=append_today, append_version=append_version, sheet_name="QBF")
output_results(df=df_engines, file_path=RESULTS_FILE, append_today=append_today, append_version=append_version, sheet_name="Engines")


# In[ ]:
