# Copyright (c) 2026 The relevatr authors
"""
Global settings that can be configured by the user.

bm25_k1 : float
    Term-frequency saturation of the Okapi BM25 scorer.
bm25_b : float
    Length normalization of the Okapi BM25 scorer, between 0 and 1.
bm25_stemming : bool
    Whether the tokenizer strips common English suffixes. Off by default.
bm25_stopwords : bool
    Whether the tokenizer drops English stop words. Off by default.
squad_distractors : int
    Number of BM25 distractors added to every adapted SQuAD question (list of k + 1 contexts).
hotpotqa_list_len : int
    Number of contexts a HotPotQA record must carry.
musique_list_len : int
    Number of contexts a MuSiQue record must carry.
care_list_len : int
    Default number of retrieved contexts shown to the context-aware judge.
replication_per_cell : int
    Pairs drawn per (level, type, label) cell by the HotPotQA replication plan.
balanced_per_label : int
    Pairs drawn per gold label by the balanced plan.
seed : int
    Default seed for sampling and statistics.
temperature : float
    Sampling temperature of live completions.
max_output_tokens : int
    Output token cap of live completions.
max_retries : int
    Number of retries after a transient transport failure.
backoff_base : float
    First retry delay in seconds, doubled on every further retry.
backoff_cap : float
    Maximum retry delay in seconds.
request_timeout : float
    HTTP timeout in seconds.
max_in_flight : int
    Maximum number of concurrent requests per client.
provider_max_in_flight : dict[str, int]
    Per-provider override of max_in_flight, keyed by provider name ("openai", "gemini").
openai_base_url_env, openai_api_key_env, gemini_base_url_env, gemini_api_key_env : str
    Names of the environment variables holding endpoints and credentials.
bootstrap_resamples : int
    Number of bootstrap resamples.
alpha : float
    Significance level of confidence intervals and permutation tests.
permutations : int
    Number of rounds of the paired permutation test.
display_decimals : int
    Decimals shown in human-readable tables.
"""

bm25_k1: float = 1.2
bm25_b: float = 0.75
bm25_stemming: bool = False
bm25_stopwords: bool = False

squad_distractors: int = 19
hotpotqa_list_len: int = 10
musique_list_len: int = 20

care_list_len: int = 10

replication_per_cell: int = 100
balanced_per_label: int = 600
seed: int = 7

temperature: float = 0.0
max_output_tokens: int = 512
max_retries: int = 4
backoff_base: float = 1.0
backoff_cap: float = 30.0
request_timeout: float = 60
max_in_flight: int = 8
provider_max_in_flight: dict[str, int] = {}

openai_base_url_env: str = "OPENAI_BASE_URL"
openai_api_key_env: str = "OPENAI_API_KEY"  # noqa: S105
gemini_base_url_env: str = "GEMINI_BASE_URL"
gemini_api_key_env: str = "GEMINI_API_KEY"  # noqa: S105

bootstrap_resamples: int = 5000
alpha: float = 0.05
permutations: int = 9999

display_decimals: int = 3
