"""Satisfiability, model checking and reductions for two-variable logic over finite unranked trees."""
