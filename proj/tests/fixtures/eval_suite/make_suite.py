"""Regenerates the 20-item scripted evaluation suite in this directory."""
import json
import pathlib

ROOT = pathlib.Path(__file__).parent
VIDEOS = ["kitchen", "garden", "office", "street"]
TYPES = ["C", "T", "D"]


def action(tool, frames, bbox=None, obj=None):
    parts = [f"'tool_name': '{tool}'"]
    if obj:
        parts.append(f"'object_name': '{obj}'")
    parts.append(f"'frame_range': '{frames}'")
    if bbox:
        parts.append(f"'bbox': '{bbox}'")
    return "{'Action': {" + ", ".join(parts) + "}}"


def yes(label, cf):
    return f"Yes, the answer is {label}, (confidence score = {cf})"


NO = "No, I do not have enough information to answer the question. (confidence score = 0)"
CAP = action("Image Caption Tool", "4-6")
DET = action("Object Detection Tool", "10")
ZCAP = action("Image Zoom in and Caption Tool", "12", "[100, 100, 300, 300]")
TRK = action("Object Tracking Tool", "8-14", obj="cup")


def script(kind, gold, wrong):
    summary = "A person moves around and handles a few objects."
    r = [summary]
    if kind == "fast":
        r += [yes(gold, 5)]
    elif kind == "one_tool":
        r += [yes(wrong, 2), "Plan: look at frames 4-6.\n" + CAP, yes(gold, 5)]
    elif kind == "two_tools":
        r += [yes(wrong, 1), "Plan: detect, then track.\n" + DET, yes(wrong, 3), TRK, yes(gold, 5)]
    elif kind == "budget":
        r += [NO, CAP, yes(wrong, 1), DET, yes(gold, 2), ZCAP, yes(gold, 3), TRK, yes(gold, 4)]
    elif kind == "budget_wrong":
        r += [NO, DET, NO, CAP, NO, TRK, yes(wrong, 2), ZCAP, yes(wrong, 3)]
    elif kind == "reprompt":
        r += ["I think it is probably the second one.", yes(gold, 5)]
    elif kind == "bad_action":
        r += [yes(wrong, 2), "I would caption some frames.", CAP, yes(gold, 4), DET, yes(gold, 5)]
    elif kind == "planner_fail":
        r += [yes(gold, 3), "Let me think about it.", "Still thinking."]
    elif kind == "out_of_range":
        r += [yes(wrong, 2), action("Image Caption Tool", "90-95"), yes(wrong, 2), CAP, yes(gold, 5)]
    elif kind == "exhausted":
        r += [yes(wrong, 2), CAP]
    return r


KINDS = ["fast", "one_tool", "two_tools", "budget", "reprompt", "bad_action", "planner_fail",
         "out_of_range", "budget_wrong", "exhausted"]


def scene_text(video):
    lines = ["frames 40", "size 640 480"]
    for f in range(40):
        lines.append(f"caption {f} The {video} scene at frame {f} (confidence=0.{50 + f}), "
                     f"a person holds a cup (confidence=0.{99 - f}).")
    lines.append(f"zoomcaption 12 [100, 100, 300, 300] A red cup on the {video} table (confidence=0.87).")
    for f in range(5, 16):
        lines.append(f"det {f} cup {100 + f} 120 {160 + f} 200 0.{40 + 3 * f}")
        lines.append(f"det {f} person 300 40 420 470 0.9{f % 10}")
    # The cup is seeded at frame 15 (0.85); follow it across 8-14.
    for f in range(5, 16):
        lines.append(f"trk 15 cup {f} {100 + f} 121 {160 + f} 201 0.8{f % 10}")
    lines.append("trk 15 person 10 LOST")
    return "\n".join(lines) + "\n"


def main():
    (ROOT / "videos").mkdir(exist_ok=True)
    (ROOT / "llm").mkdir(exist_ok=True)
    for v in VIDEOS:
        (ROOT / "videos" / f"{v}.manifest").write_text(
            f"video_id = {v}\nlength_s = 40\nnative_fps = 30\nsource = synthetic\nwidth = 640\nheight = 480\n")
        (ROOT / "videos" / f"{v}.scene").write_text(scene_text(v))
        caps = "".join(f"{i}\t#C C walks around the {v} (clip {i}).\n" for i in range(10))
        (ROOT / "videos" / f"{v}.captions").write_text("#markers egocentric\n" + caps)
    items = []
    for i in range(20):
        item_id = f"q{i + 1:02d}"
        kind = KINDS[i % len(KINDS)]
        gold = "ABCDE"[i % 5]
        wrong = "ABCDE"[(i + 2) % 5]
        item = {"item_id": item_id, "video_id": VIDEOS[i % 4],
                "question": f"What does the person do with the cup in question {i + 1}?",
                "options": [f"option text {k} for {item_id}" for k in range(5)],
                "type": TYPES[i % 3]}
        if i != 13:
            item["answer"] = gold
        items.append(item)
        body = "".join(f"@@ reply\n{reply}\n" for reply in script(kind, gold, wrong))
        (ROOT / "llm" / f"{item_id}.script").write_text(f"# {kind}\n" + body)
    (ROOT / "items.jsonl").write_text("".join(json.dumps(it) + "\n" for it in items))


if __name__ == "__main__":
    main()
