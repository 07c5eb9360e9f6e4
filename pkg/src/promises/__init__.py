"""Future-tense promise counting and its return regressions.

Subpackage layout:

corpus       -- filing/transcript ingestion, markup stripping, speaker segmentation
futuretense  -- tokenizer, sentence splitter, marker counter (compiled kernel
                with pure-Python fallback)
returns      -- log returns, excess returns, lagged count/return panel
econometrics -- OLS, random-effects GLS, cluster-robust inference
reporting    -- fixed-width regression tables and JSON results
debates      -- per-candidate totals, winner rule, loser-winner t-test
cli          -- the ``promises`` command line tool
"""

__version__ = "0.1.0"
