#!/usr/bin/env python3
"""Toy trainer that prints one metric line per epoch."""
import argparse

parser = argparse.ArgumentParser()
parser.add_argument("--lr", type=float, required=True)
parser.add_argument("--optimizer", required=True)
args = parser.parse_args()
bonus = 0.05 if args.optimizer == "adam" else 0.0
for epoch in range(1, 4):
    print(f"{epoch} accuracy={1.0 - abs(args.lr - 0.2) - bonus / epoch:.4f}", flush=True)
