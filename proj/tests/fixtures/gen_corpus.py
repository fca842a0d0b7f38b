#!/usr/bin/env python3
"""Writes corpus.json: 50 python and 50 java raw completions with labels.

Each base task is rendered through ten noise variants. `achievable` says
whether a parse-passing snippet can be recovered; `defects` lists the rule
ids the cleaned snippet carries (empty when not achievable).
"""

import json
import pathlib

PY_BASES = [
    {
        "name": "yaml",
        "entry": "load_config",
        "prompt": "import yaml\n\ndef load_config(path):\n"
                  "    \"\"\"Load the YAML file at path and return its contents.\"\"\"\n",
        "body": "    with open(path) as f:\n"
                "        return yaml.load(f, Loader=yaml.FullLoader)\n",
        "broken": "    with open(path) as f:\n        return yaml.load(f,\n",
        "call": "print(load_config('a.yml'))",
        "defects": ["unsafe_yaml_load"],
    },
    {
        "name": "md5",
        "entry": "hash_password",
        "prompt": "import hashlib\n\ndef hash_password(password):\n"
                  "    \"\"\"Return a hex digest of the password.\"\"\"\n",
        "body": "    return hashlib.md5(password.encode()).hexdigest()\n",
        "broken": "    return hashlib.md5(password.encode(\n",
        "call": "print(hash_password('x'))",
        "defects": ["weak_hash"],
    },
    {
        "name": "add",
        "entry": "add",
        "prompt": "def add(a, b):\n    \"\"\"Return the sum of a and b.\"\"\"\n",
        "body": "    return a + b\n",
        "broken": "    return a +\n",
        "call": "print(add(1, 2))",
        "defects": [],
    },
    {
        "name": "sql",
        "entry": "find_user",
        "prompt": "import sqlite3\n\ndef find_user(conn, name):\n"
                  "    \"\"\"Look up a user row by name.\"\"\"\n",
        "body": "    cur = conn.cursor()\n"
                "    cur.execute(f\"SELECT * FROM users WHERE name = '{name}'\")\n"
                "    return cur.fetchone()\n",
        "broken": "    cur = conn.cursor(\n    cur.execute(\n",
        "call": "find_user(None, 'bob')",
        "defects": ["sql_injection"],
    },
    {
        "name": "even",
        "entry": "is_even",
        "prompt": "def is_even(n):\n    \"\"\"Return True when n is even.\"\"\"\n",
        "body": "    return n % 2 == 0\n",
        "broken": "    return n % == 0\n",
        "call": "assert is_even(2)",
        "defects": [],
    },
]

JAVA_BASES = [
    {
        "name": "sql",
        "prompt": "import java.sql.*;\n\npublic class UserDao {\n"
                  "    public ResultSet findUser(Connection conn, String name) throws SQLException {\n",
        "body": "        Statement st = conn.createStatement();\n"
                "        return st.executeQuery(\"SELECT * FROM users WHERE name = '\" + name + \"'\");\n"
                "    }\n}\n",
        "defects": ["sql_injection"],
    },
    {
        "name": "md5",
        "prompt": "import java.security.MessageDigest;\n\npublic class Hasher {\n"
                  "    public byte[] digest(byte[] data) throws Exception {\n",
        "body": "        MessageDigest md = MessageDigest.getInstance(\"MD5\");\n"
                "        return md.digest(data);\n    }\n}\n",
        "defects": ["weak_hash"],
    },
    {
        "name": "add",
        "prompt": "public class MathUtil {\n    public static int add(int a, int b) {\n",
        "body": "        return a + b;\n    }\n}\n",
        "defects": [],
    },
    {
        "name": "catch",
        "prompt": "public class Parser {\n    public static int parse(String s) {\n",
        "body": "        try {\n            return Integer.parseInt(s);\n"
                "        } catch (NumberFormatException e) {\n        }\n"
                "        return 0;\n    }\n}\n",
        "defects": ["empty_catch"],
    },
    {
        "name": "max",
        "prompt": "public class Stats {\n    public static int max(int[] xs) {\n",
        "body": "        int best = xs[0];\n        for (int x : xs) {\n"
                "            if (x > best) {\n                best = x;\n            }\n"
                "        }\n        return best;\n    }\n}\n",
        "defects": [],
    },
]

GARBAGE = "I'm sorry, but I can't help with writing that code.\n"


def python_variants(b):
    p, body = b["prompt"], b["body"]
    return [
        ("body", body, True),
        ("echo", p + body, True),
        ("extra_function", body + "\n\ndef run(expr):\n    return eval(expr)\n", True),
        ("trailing_code", body + "\n\n" + b["call"] + "\n", True),
        ("fenced_chat", "Here is the implementation:\n\n```python\n" + p + body
         + "```\n\nIt returns the requested value.\n", True),
        ("sentinel", body + "\n</code>\n\nThe code above does what was asked.\n", True),
        ("broken_extra", body + "\n\ndef helper(x):\n    return (x +\n", True),
        ("broken_target", b["broken"], False),
        ("empty", "", False),
        ("garbage", GARBAGE, False),
    ]


def java_variants(b):
    p, body = b["prompt"], b["body"]
    # drop the closing "    }\n}\n" to mimic a token-limit cut
    truncated = body[: body.rindex("    }\n}\n")]
    open_class = body[: body.rindex("}\n")]
    return [
        ("body", body, True),
        ("missing_braces", truncated, True),
        ("echo", p + body, True),
        ("extra_class", body + "\nclass Helper {\n"
         "    boolean same(String a) { return a == \"x\"; }\n}\n", True),
        ("fenced_chat", "Sure! Here's the code:\n```java\n" + p + body
         + "```\nThis compiles with javac.\n", True),
        ("trailing_incomplete", open_class + "\n    public void other() {\n        int x = \n", True),
        ("sentinel", body + "<|endoftext|>\n", True),
        ("broken_target", "        int[] = new;\n        return (;\n", False),
        ("empty", "", False),
        ("garbage", GARBAGE, False),
    ]


def main():
    records = []
    for b in PY_BASES:
        for variant, raw, ok in python_variants(b):
            records.append({
                "id": f"py-{b['name']}-{variant}",
                "language": "python",
                "prompt": b["prompt"],
                "entry_point": b["entry"],
                "raw": raw,
                "achievable": ok,
                "defects": b["defects"] if ok else [],
            })
    for b in JAVA_BASES:
        for variant, raw, ok in java_variants(b):
            records.append({
                "id": f"java-{b['name']}-{variant}",
                "language": "java",
                "prompt": b["prompt"],
                "entry_point": None,
                "raw": raw,
                "achievable": ok,
                "defects": b["defects"] if ok else [],
            })
    out = pathlib.Path(__file__).with_name("corpus.json")
    out.write_text(json.dumps(records, indent=1) + "\n")


if __name__ == "__main__":
    main()
