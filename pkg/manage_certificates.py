#!/usr/bin/env python3
"""
Certificate Ledger Tool

Browse, re-check, export and remove the certificates recorded by the CLI.
Run: python manage_certificates.py [path/to/certificates.db]
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / 'src'))

from certificates.store import CertificateStore  # noqa: E402
from errors import SkewCertError  # noqa: E402
from settings import config  # noqa: E402
from utils.codec import verify_document  # noqa: E402

RESET = '\033[0m'
STYLES = {
    'title': '\033[1m\033[96m',
    'strong': '\033[1m',
    'prompt': '\033[93m',
    'ok': '\033[92m',
    'bad': '\033[91m',
    'note': '\033[94m',
}
MARKS = {'ok': '✓', 'bad': '✗', 'note': 'ℹ'}


def paint(style, text):
    return f"{STYLES[style]}{text}{RESET}"


def report(style, text):
    print(paint(style, f"{MARKS[style]} {text}"))


def print_header(text):
    rule = '=' * 60
    print('\n' + paint('title', rule))
    print(paint('title', f"{text:^60}"))
    print(paint('title', rule) + '\n')


def choose_entry(store):
    """Ask for a row number; returns the entry or None."""
    entries = store.list()
    if not entries:
        report('note', "The ledger is empty")
        return None
    for i, entry in enumerate(entries, 1):
        print(f"  {paint('ok', f'{i}.')} {entry['schema']:<16} {entry['action']:<22} {entry['digest'][:12]}")
    print('\n' + paint('prompt', "Enter number (or 'q' to cancel):"))
    choice = input("Choice: ").strip()
    if choice.lower() == 'q':
        return None
    try:
        index = int(choice) - 1
    except ValueError:
        report('bad', "Please enter a valid number!")
        return None
    if not 0 <= index < len(entries):
        report('bad', "Invalid choice!")
        return None
    return entries[index]


def list_certificates(store):
    print_header("Recorded Certificates")
    entries = store.list()
    if not entries:
        report('note', "The ledger is empty")
        return
    for entry in entries:
        mark = paint('ok', 'accepted') if entry['accepted'] else paint('bad', 'rejected')
        print(f"{paint('strong', entry['digest'][:12])}  {entry['schema']:<16} {entry['action']:<22} {mark}")
        if entry['reason']:
            print(f"    reason: {entry['reason']}")
        print(f"    recorded: {entry['created_at']}")


def recheck_certificate(store):
    print_header("Re-check Certificate")
    entry = choose_entry(store)
    if entry is None:
        return
    document = store.load(entry['digest'])
    try:
        verdict = verify_document(document, config['probe']['max_materialized_configs'])
    except SkewCertError as e:
        report('bad', f"Stored document no longer decodes: {e}")
        return
    if verdict:
        report('ok', f"{entry['schema']} accepted")
    else:
        report('bad', f"{entry['schema']} rejected: {verdict.reason}")


def export_certificate(store):
    print_header("Export Certificate")
    entry = choose_entry(store)
    if entry is None:
        return
    default = f"{entry['digest'][:12]}.json"
    path = input(f"File [{default}]: ").strip() or default
    with open(path, 'w') as f:
        json.dump(store.load(entry['digest']), f, indent=2, sort_keys=True)
    report('ok', f"Wrote {path}")


def remove_certificate(store):
    print_header("Remove Certificate")
    entry = choose_entry(store)
    if entry is None:
        return
    print('\n' + paint('bad', f"Remove {entry['digest'][:12]}? (y/n):"))
    if input().strip().lower() != 'y':
        report('note', "Cancelled")
        return
    if store.remove(entry['digest']):
        report('ok', "Certificate removed!")
    else:
        report('bad', "Nothing was removed")


MENU = (
    ('1', "List certificates", list_certificates),
    ('2', "Re-check a certificate", recheck_certificate),
    ('3', "Export a certificate", export_certificate),
    ('4', "Remove a certificate", remove_certificate),
)


def main_menu(store):
    """Display main menu and handle user input"""
    actions = {key: action for key, _, action in MENU}
    while True:
        print_header("Certificate Ledger")
        print(paint('strong', "What would you like to do?") + '\n')
        for key, label, _ in MENU:
            print(f"  {paint('ok', key + '.')} {label}")
        print(f"  {paint('ok', '5.')} Exit")

        print('\n' + paint('prompt', "Enter your choice (1-5):"))
        choice = input("> ").strip()

        if choice in actions:
            actions[choice](store)
            input("\nPress Enter to continue...")
        elif choice == '5':
            report('note', "Goodbye!")
            break
        else:
            report('bad', "Invalid choice! Please enter 1-5")
            input("\nPress Enter to continue...")


if __name__ == "__main__":
    path = sys.argv[1] if len(sys.argv) > 1 else config['store'].get('path')
    store = CertificateStore(path)
    try:
        main_menu(store)
    except KeyboardInterrupt:
        print('\n\n' + paint('note', "Interrupted by user. Goodbye!"))
    finally:
        store.close()
