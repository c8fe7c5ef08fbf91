#include "sindarin/lumen/compiler.hpp"

#include <mutex>

namespace sindarin::lumen {

namespace {

// The builtin class library. Methods without a body here are primitives
// (see primitives.cpp); everything below is compiled like user code so the
// debugger can step into it.
const char* const kPrelude = R"LUMEN(
class Object {
    method = other { ^self == other }
    method ~= other { ^(self = other) not }
    method ~~ other { ^(self == other) not }
    method isNil { ^false }
    method notNil { ^true }
    method ifNil: aBlock { ^self }
    method ifNotNil: aBlock { ^aBlock cull: self }
    method ifNil: nilBlock ifNotNil: notNilBlock { ^notNilBlock cull: self }
    method value { ^self }
    method yourself { ^self }
    method species { ^self class }
    method isString { ^false }
    method isSymbol { ^false }
    method isNumber { ^false }
    method isInteger { ^false }
    method isBlock { ^false }
    method isCollection { ^false }
    method isClass { ^false }
    method error: text { ^(Error new messageText: text) signal }
    method assert: aBoolean { aBoolean ifFalse: [^self error: 'assertion failed'] }
    method doesNotUnderstand: aMessage {
        ^(MessageNotUnderstood new message: aMessage receiver: self) signal
    }
}

class UndefinedObject {
    method isNil { ^true }
    method notNil { ^false }
    method ifNil: aBlock { ^aBlock value }
    method ifNotNil: aBlock { ^nil }
    method ifNil: nilBlock ifNotNil: notNilBlock { ^nilBlock value }
}

class Boolean { }
class True extends Boolean { }
class False extends Boolean { }

class Integer {
    method isNumber { ^true }
    method isInteger { ^true }
    method isZero { ^self = 0 }
    method even { ^self \\ 2 = 0 }
    method odd { ^self even not }
    method abs { self < 0 ifTrue: [^self negated]. ^self }
    method max: other { self > other ifTrue: [^self]. ^other }
    method min: other { self < other ifTrue: [^self]. ^other }
    method between: low and: high { ^self >= low and: [self <= high] }
    method squared { ^self * self }
}

class String {
    method isString { ^true }
    method isEmpty { ^self size = 0 }
    method notEmpty { ^self isEmpty not }
    method do: aBlock { 1 to: self size do: [:i | aBlock value: (self at: i)] }
}

class Symbol {
    method isSymbol { ^true }
}

class Block {
    method isBlock { ^true }
}

class Class {
    method isClass { ^true }
}

class CompiledMethod { }
class AstNode { }

class Message {
    fields selector arguments.
    method selector { ^selector }
    method arguments { ^arguments }
    method selector: aSymbol arguments: anArray { selector := aSymbol. arguments := anArray }
}

class Collection {
    method do: aBlock { 1 to: self size do: [:i | aBlock value: (self at: i)] }
    method collect: aBlock {
        | newCollection |
        newCollection := self species new.
        self do: [:each | newCollection add: (aBlock value: each)].
        ^newCollection
    }
    method select: aBlock {
        | result |
        result := self species new.
        self do: [:each | (aBlock value: each) ifTrue: [result add: each]].
        ^result
    }
    method reject: aBlock { ^self select: [:each | (aBlock value: each) not] }
    method detect: aBlock ifNone: noneBlock {
        self do: [:each | (aBlock value: each) ifTrue: [^each]].
        ^noneBlock value
    }
    method detect: aBlock { ^self detect: aBlock ifNone: [nil] }
    method anySatisfy: aBlock {
        self do: [:each | (aBlock value: each) ifTrue: [^true]].
        ^false
    }
    method allSatisfy: aBlock {
        self do: [:each | (aBlock value: each) ifFalse: [^false]].
        ^true
    }
    method count: aBlock {
        | n |
        n := 0.
        self do: [:each | (aBlock value: each) ifTrue: [n := n + 1]].
        ^n
    }
    method inject: initial into: aBlock {
        | acc |
        acc := initial.
        self do: [:each | acc := aBlock value: acc value: each].
        ^acc
    }
    method sum { ^self inject: 0 into: [:a :b | a + b] }
    method includes: anObject { ^self anySatisfy: [:each | each = anObject] }
    method isEmpty { ^self size = 0 }
    method notEmpty { ^self isEmpty not }
    method isCollection { ^true }
    method first { ^self at: 1 }
    method last { ^self at: self size }
    method withIndexDo: aBlock { 1 to: self size do: [:i | aBlock value: (self at: i) value: i] }
    method reverseDo: aBlock {
        | i |
        i := self size.
        [i > 0] whileTrue: [aBlock value: (self at: i). i := i - 1]
    }
    method do: aBlock separatedBy: separatorBlock {
        | first |
        first := true.
        self do: [:each |
            first ifFalse: [separatorBlock value].
            first := false.
            aBlock value: each]
    }
}

class Array extends Collection {
    method species { ^OrderedCollection }
}

class OrderedCollection extends Collection {
    method addAll: aCollection {
        aCollection do: [:each | self add: each].
        ^aCollection
    }
}

class ContextStack extends OrderedCollection {
    method copy { ^self collect: [:ctx | ctx copy] }
}

class Dictionary extends Collection {
    method at: key ifAbsent: aBlock {
        (self includesKey: key) ifTrue: [^self at: key].
        ^aBlock value
    }
    method at: key ifPresent: aBlock {
        (self includesKey: key) ifTrue: [^aBlock cull: (self at: key)].
        ^nil
    }
    method at: key ifPresent: presentBlock ifAbsent: absentBlock {
        (self includesKey: key) ifTrue: [^presentBlock cull: (self at: key)].
        ^absentBlock value
    }
    method at: key ifAbsentPut: aBlock {
        (self includesKey: key) ifTrue: [^self at: key].
        ^self at: key put: aBlock value
    }
    method at: key ifPresent: presentBlock ifAbsentPut: absentBlock {
        (self includesKey: key) ifTrue: [^presentBlock cull: (self at: key)].
        ^self at: key put: absentBlock value
    }
    method do: aBlock { self values do: aBlock }
    method keysDo: aBlock { self keys do: aBlock }
    method keysAndValuesDo: aBlock {
        self keys do: [:k | aBlock value: k value: (self at: k)]
    }
}

class TranscriptStream {
    method print: anObject { self show: anObject printString }
    method display: anObject { self show: anObject displayString }
}

class Exception {
    fields messageText.
    method messageText { ^messageText ifNil: [self description] }
    method messageText: aString { messageText := aString }
    method description { ^self class name }
    method signal: aString { messageText := aString. ^self signal }
}

class Error extends Exception { }
class ArithmeticError extends Error { }
class ZeroDivide extends ArithmeticError { }
class SubscriptOutOfBounds extends Error { }
class KeyNotFound extends Error { }
class BlockCannotReturn extends Error { }

class MessageNotUnderstood extends Error {
    fields message receiver.
    method message: aMessage receiver: anObject { message := aMessage. receiver := anObject }
    method message { ^message }
    method receiver { ^receiver }
}

class FileAlreadyOpen extends Error {
    fields file.
    method file: aFile { file := aFile }
    method file { ^file }
}

class DebuggerError extends Error {
    fields code.
    method code { ^code }
    method code: aSymbol { code := aSymbol }
}

class File {
    fields name isOpen.
    method name { ^name }
    method name: aString { name := aString }
    method isOpen { ^isOpen == true }
    method open {
        self isOpen ifTrue: [^(FileAlreadyOpen new file: self) signal].
        isOpen := true
    }
    method close { isOpen := false }
}

class Random {
    fields seed.
    method seed: anInteger { seed := anInteger \\ 2147483646 + 1 }
    method next {
        seed isNil ifTrue: [self seed: DefaultSeed].
        seed := seed * 48271 \\ 2147483647.
        ^seed
    }
    method nextInt: n { ^self next \\ n + 1 }
}

class ScriptableDebugger { }
class Context { }
class Breakpoint { }
class DebuggerHit { }
)LUMEN";

} // namespace

const std::string& prelude_source() {
    static const std::string source = kPrelude;
    return source;
}

std::shared_ptr<const CompiledProgram> prelude() {
    static std::shared_ptr<const CompiledProgram> compiled;
    static std::once_flag once;
    std::call_once(once, [] {
        ParseOptions opts;
        opts.unit = "<prelude>";
        opts.first_id = kPreludeFirstNodeId;
        compiled = compile(parse_program(prelude_source(), opts), nullptr);
    });
    return compiled;
}

} // namespace sindarin::lumen
