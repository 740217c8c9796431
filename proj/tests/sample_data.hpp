#pragma once

#include <string>

// The 14-row annotated excerpt (parent, index, raw) from the #ubuntu logs
// used throughout the corpus and inference tests.
inline const std::string kUbuntuSample =
    "996\t1000\t[03:04] Amaranth: @cliche American\n"
    "992\t1001\t[03:04] Xenguy: @Amaranth I thought you were -- welcome mortal ;-)\n"
    "1000\t1002\t[03:04] cliche: @ Amaranth, hahahaha\n"
    "1003\t1003\t=== welshbyte  has joined #ubuntu\n"
    "997\t1004\t[03:04] e-sin: no i just want the normal screensavers\n"
    "995\t1005\t[03:04] Amaranth: @benoy Do you have cygwinx installed and running?\n"
    "1006\t1006\t[03:04] babelfishi: can anyone help me install my Netgear MA111 USB adapter?\n"
    "1004\t1007\t[03:04] e-sin: i have a 16mb video card\n"
    "1008\t1008\t=== regeya  has joined #ubuntu\n"
    "1007\t1009\t[03:04] e-sin: TNT2 :)\n"
    "1001\t1010\t[03:05] Amaranth: @Xenguy hehe, i do side development\n"
    "1007\t1011\t[03:05] jobezone: @e-sin then it's xscreensaver and xscreensave-gl for opengl ones.\n"
    "1005\t1012\t[03:05] benoy: how do i install that?  I couldn't find that in the list of things\n"
    "1010\t1013\t[03:05] Amaranth: @Xenguy things like alacarte and easyubuntu\n";
