#!/usr/bin/env python3
"""Generates the bundled desk-scale sample dataset.

Writes data/sample/urls.csv and data/sample/enrichment.jsonl. The corpus is
synthetic but mirrors the structure of public benign/phishing feeds:

* benign URLs sit on many distinct domains with reputable nameservers and
  mostly dedicated IPs,
* phishing URLs concentrate on a few hosting clusters (shared nameservers
  and shared IPs) and reuse a characteristic vocabulary,
* a camouflage slice makes a fraction of each class lexically resemble the
  other so string-only models cannot saturate,
* a small enrichment gap leaves some domains without infrastructure data.

Regeneration is deterministic (fixed seed). The output files are frozen in
the repository; rerun this script only when intentionally rebuilding them.
"""

import json
import random
from pathlib import Path

SEED = 20240615
OUT_DIR = Path(__file__).resolve().parent.parent / "data" / "sample"

N_BENIGN_DOMAINS = 300
N_PHISH_DOMAINS = 320
N_BENIGN_URLS = 1600
N_PHISH_URLS = 800

# singleton domains with no enrichment coverage: the graph sees almost
# nothing for them, so per-URL priors carry the signal
N_BENIGN_LONERS = 30
N_PHISH_LONERS = 45

BENIGN_TLDS = ["com", "org", "net", "com", "com", "org", "io", "co.uk", "de", "fr"]
PHISH_TLDS = ["xyz", "top", "icu", "online", "club", "site", "biz", "info", "live", "space"]

BENIGN_NAME_PARTS = [
    "bright", "city", "green", "north", "summit", "harbor", "cedar", "willow", "globe",
    "prime", "swift", "nova", "metro", "alpine", "coastal", "golden", "iron", "maple",
    "quiet", "rapid", "solid", "true", "urban", "vivid", "wide", "zen", "clear", "deep",
]
BENIGN_NAME_SUFFIX = [
    "news", "books", "media", "labs", "market", "travel", "kitchen", "garden", "sports",
    "photo", "music", "health", "finance", "school", "library", "museum", "journal",
    "weather", "recipes", "gallery",
]

FAKE_BRANDS = [
    "payvault", "bankorbit", "cloudmail", "netsecure", "cryptoport", "walletplus",
    "fastpay", "securebank", "mailboxpro", "idcentral", "safetransfer", "webwallet",
]
PHISH_PREFIX = ["secure", "login", "verify", "account", "update", "signin", "auth", "portal"]
PHISH_JOIN = ["-", "", "."]

BENIGN_PATH_WORDS = [
    "news", "article", "blog", "post", "story", "product", "category", "item", "view",
    "page", "docs", "help", "about", "contact", "search", "archive", "tags", "events",
    "gallery", "review", "guide", "tutorial", "recipe", "forum", "topic", "thread",
    "profile", "team", "career", "press", "research", "report", "science", "history",
    "culture", "travel", "sport", "music", "movie", "book", "photo", "video", "weather",
    "local", "world", "business", "opinion", "health", "education", "technology",
]
PHISH_PATH_WORDS = [
    "login", "signin", "verify", "secure", "account", "update", "confirm", "webscr",
    "session", "token", "billing", "password", "credential", "wallet", "invoice",
    "limited", "suspended", "unlock", "recover", "restore", "validate", "identity",
    "alert", "warning", "expired", "renewal", "submit", "access", "portal", "bonus",
    "reward", "prize", "claim", "gift", "promo", "free", "urgent", "action",
]
SHARED_PATH_WORDS = ["account", "mail", "id", "user", "home", "index", "service", "support"]

CONSONANTS = "bcdfghjklmnpqrstvwxz"
VOWELS = "aeiou"


def dga_name(rng, length):
    out = []
    for i in range(length):
        out.append(rng.choice(CONSONANTS if i % 2 == 0 else VOWELS + CONSONANTS))
    return "".join(out)


def make_benign_domains(rng):
    domains = []
    seen = set()
    while len(domains) < N_BENIGN_DOMAINS:
        name = rng.choice(BENIGN_NAME_PARTS) + rng.choice(BENIGN_NAME_SUFFIX)
        tld = rng.choice(BENIGN_TLDS)
        domain = f"{name}.{tld}"
        if domain in seen:
            continue
        seen.add(domain)
        domains.append(domain)
    return domains


def make_phish_domains(rng):
    domains = []
    seen = set()
    while len(domains) < N_PHISH_DOMAINS:
        style = rng.random()
        if style < 0.55:
            # brand-squat style
            name = rng.choice(PHISH_PREFIX) + rng.choice(["-", ""]) + rng.choice(FAKE_BRANDS)
            if rng.random() < 0.4:
                name += rng.choice(["-check", "-online", "-portal", str(rng.randrange(10, 99))])
            tld = rng.choice(PHISH_TLDS)
        elif style < 0.85:
            # algorithmic-looking
            name = dga_name(rng, rng.randrange(8, 14))
            tld = rng.choice(PHISH_TLDS[:4])
        else:
            # compromised-looking: benign-style name on a common TLD
            name = rng.choice(BENIGN_NAME_PARTS) + rng.choice(BENIGN_NAME_SUFFIX)
            tld = "com"
        domain = f"{name}.{tld}"
        if domain in seen:
            continue
        seen.add(domain)
        domains.append(domain)
    return domains


# budget hosts serve benign hobby sites and phishing alike, so their
# nameserver and IP nodes carry genuinely mixed evidence
BUDGET_NS = [
    ("ns1.pennyhost.net", "ns2.pennyhost.net"),
    ("ns1.cheapbox.org", "ns2.cheapbox.org"),
    ("ns1.sharedredir.com", "ns2.sharedredir.com"),
    ("ns1.flatrate-dns.net", "ns2.flatrate-dns.net"),
]
BULLET_NS = [
    ("ns1.fastflux-dns.ru", "ns2.fastflux-dns.ru"),
    ("ns1.offshorepanel.cn", "ns2.offshorepanel.cn"),
    ("ns1.greyrock-host.com", "ns2.greyrock-host.com"),
]


def make_budget_ips(rng):
    return [f"203.0.{rng.randrange(113, 119)}.{rng.randrange(1, 255)}" for _ in range(30)]


def assign_benign_hosting(rng, domains, budget_ips):
    providers = [f"dns{i}.steadyhost.net" for i in range(1, 7)] + [
        f"ns{i}.reliablezone.com" for i in range(1, 7)
    ]
    cdn_ips = [f"151.101.{rng.randrange(0, 64)}.{rng.randrange(1, 255)}" for _ in range(8)]
    hosting = {}
    for idx, domain in enumerate(domains):
        if rng.random() < 0.35:
            # shared budget hosting
            ns = list(rng.choice(BUDGET_NS))
            ips = [rng.choice(budget_ips)]
        else:
            provider = providers[idx % len(providers)]
            ns = [f"a.{provider}", f"b.{provider}"]
            if rng.random() < 0.15:
                ips = [rng.choice(cdn_ips)]
            else:
                ips = [f"192.0.{rng.randrange(2, 200)}.{rng.randrange(1, 255)}"]
                if rng.random() < 0.2:
                    ips.append(f"198.51.{rng.randrange(0, 200)}.{rng.randrange(1, 255)}")
        hosting[domain] = (ips, ns)
    return hosting, cdn_ips


def assign_phish_hosting(rng, domains, benign_hosting, budget_ips):
    bullet_ips = [f"185.220.{rng.randrange(100, 103)}.{rng.randrange(1, 255)}" for _ in range(12)]
    hosting = {}
    reputable = [h for h in benign_hosting.values()]
    for domain in domains:
        roll = rng.random()
        if roll < 0.08:
            # a few phishing domains hide behind reputable infrastructure
            ips, ns = rng.choice(reputable)
            hosting[domain] = (list(ips), list(ns))
        elif roll < 0.68:
            # most sit on budget hosts next to benign neighbors
            ns = list(rng.choice(BUDGET_NS))
            ips = [rng.choice(budget_ips)]
            if rng.random() < 0.25:
                ips.append(rng.choice(budget_ips))
        else:
            # dedicated abusive infrastructure
            ns = list(rng.choice(BULLET_NS))
            ips = [rng.choice(bullet_ips)]
        hosting[domain] = (ips, ns)
    return hosting, bullet_ips + budget_ips


def benign_path(rng, messy):
    words = BENIGN_PATH_WORDS
    if messy:
        # tracking-heavy, digit-laden path that looks suspicious
        parts = [rng.choice(words), rng.choice(words)]
        path = "/" + "/".join(parts) + f"/{rng.randrange(100000, 999999)}.html"
        query = (
            f"?utm_source={rng.choice(words)}&session={rng.getrandbits(48):012x}"
            f"&ref={rng.randrange(1000, 9999)}"
        )
        return path + query
    n = rng.randrange(1, 4)
    pool = words + SHARED_PATH_WORDS * 4  # shared vocabulary blurs the classes
    parts = [rng.choice(pool) for _ in range(n)]
    if rng.random() < 0.08:
        # legitimate pages reference payment brands too
        parts.append(rng.choice(FAKE_BRANDS))
    path = "/" + "/".join(parts)
    if rng.random() < 0.3:
        path += f"?id={rng.randrange(1, 500)}"
    elif rng.random() < 0.15:
        path += ".html"
    return path


def phish_path(rng, camouflaged):
    if camouflaged:
        # lexically benign: short clean words, no hex or long queries
        n = rng.randrange(1, 3)
        parts = [rng.choice(BENIGN_PATH_WORDS + SHARED_PATH_WORDS) for _ in range(n)]
        return "/" + "/".join(parts)
    n = rng.randrange(1, 4)
    pool = PHISH_PATH_WORDS + SHARED_PATH_WORDS * 3
    parts = [rng.choice(pool) for _ in range(n)]
    path = "/" + "/".join(parts)
    roll = rng.random()
    if roll < 0.35:
        path += f"?{rng.choice(['token', 'session', 'id'])}={rng.getrandbits(64):016x}"
    elif roll < 0.55:
        path += f"/{rng.choice(FAKE_BRANDS)}{rng.randrange(10, 99)}"
    if rng.random() < 0.2:
        path += f"&redirect=https%3A%2F%2F{rng.choice(FAKE_BRANDS)}.com"
    return path


def zipf_counts(rng, n_urls, domains, concentration):
    # heavier concentration puts more URLs on fewer domains
    weights = [1.0 / ((i + 1) ** concentration) for i in range(len(domains))]
    total = sum(weights)
    counts = [max(1, round(n_urls * w / total)) for w in weights]
    while sum(counts) > n_urls:
        counts[rng.randrange(len(counts))] = max(1, counts[rng.randrange(len(counts))] - 1)
    while sum(counts) < n_urls:
        counts[rng.randrange(len(counts))] += 1
    return counts


def main():
    rng = random.Random(SEED)
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    benign_domains = make_benign_domains(rng)
    phish_domains = make_phish_domains(rng)

    # loners: singleton domains with no enrichment row; their URLs only
    # connect to substrings, so the classifier prior decides them
    benign_loners = benign_domains[:N_BENIGN_LONERS]
    benign_cluster = benign_domains[N_BENIGN_LONERS:]
    phish_loners = phish_domains[:N_PHISH_LONERS]
    phish_cluster = phish_domains[N_PHISH_LONERS:]

    budget_ips = make_budget_ips(rng)
    benign_hosting, _ = assign_benign_hosting(rng, benign_cluster, budget_ips)
    phish_hosting, shared_ips = assign_phish_hosting(rng, phish_cluster, benign_hosting,
                                                     budget_ips)

    rows = []
    seen_urls = set()

    def push(url, label):
        if url in seen_urls:
            return False
        seen_urls.add(url)
        rows.append((url, label))
        return True

    counts = zipf_counts(rng, N_BENIGN_URLS - len(benign_loners), benign_cluster, 0.7)
    for domain, count in zip(benign_cluster, counts):
        made = 0
        while made < count:
            scheme = "https" if rng.random() < 0.7 else "http"
            host = domain if rng.random() < 0.6 else f"www.{domain}"
            messy = rng.random() < 0.15
            if push(f"{scheme}://{host}{benign_path(rng, messy)}", 0):
                made += 1
    for domain in benign_loners:
        scheme = "https" if rng.random() < 0.8 else "http"
        push(f"{scheme}://{domain}{benign_path(rng, False)}", 0)

    counts = zipf_counts(rng, N_PHISH_URLS - len(phish_loners) - 12, phish_cluster, 0.5)
    for domain, count in zip(phish_cluster, counts):
        made = 0
        while made < count:
            scheme = "http" if rng.random() < 0.7 else "https"
            host = domain
            if rng.random() < 0.25:
                host = f"{rng.choice(PHISH_PREFIX)}.{domain}"
            camouflaged = rng.random() < 0.18
            if push(f"{scheme}://{host}{phish_path(rng, camouflaged)}", 1):
                made += 1
    for domain in phish_loners:
        push(f"http://{domain}{phish_path(rng, False)}", 1)

    # IP-literal URLs, mostly phishing
    for _ in range(12):
        ip = rng.choice(shared_ips)
        push(f"http://{ip}{phish_path(rng, False)}", 1)
    for _ in range(3):
        ip = f"192.0.{rng.randrange(2, 200)}.{rng.randrange(1, 255)}"
        push(f"http://{ip}/{rng.choice(BENIGN_PATH_WORDS)}", 0)

    rng.shuffle(rows)

    with open(OUT_DIR / "urls.csv", "w") as f:
        f.write("url,label\n")
        for url, label in rows:
            assert "," not in url and '"' not in url
            f.write(f"{url},{label}\n")

    # enrichment covers the hosted clusters (loners stay dark) minus a
    # small random gap
    all_hosting = {}
    all_hosting.update(benign_hosting)
    all_hosting.update(phish_hosting)
    skipped = set(rng.sample(sorted(all_hosting), round(len(all_hosting) * 0.04)))
    with open(OUT_DIR / "enrichment.jsonl", "w") as f:
        for domain in sorted(all_hosting):
            if domain in skipped:
                continue
            ips, ns = all_hosting[domain]
            f.write(json.dumps({"domain": domain, "ips": ips, "nameservers": ns}) + "\n")

    benign_count = sum(1 for _, label in rows if label == 0)
    print(f"urls: {len(rows)} ({benign_count} benign / {len(rows) - benign_count} phishing)")
    print(f"domains: {len(all_hosting) + len(benign_loners) + len(phish_loners)} "
          f"({len(skipped)} cluster domains left out of enrichment, "
          f"{len(benign_loners) + len(phish_loners)} loners)")


if __name__ == "__main__":
    main()
